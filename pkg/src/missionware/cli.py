"""Command-line front end.

Every subcommand reads a model file, runs one analysis, and prints either a
human-oriented table (default) or machine-oriented JSON (``--format data``,
byte-stable across runs).  Exit codes: 0 on success, 1 when the model itself
violates a structural or readiness rule, 2 when the caller's input is bad
(unreadable file, unknown id, malformed parameters).

The threat corpus is resolved from ``--corpus``, then the
``MISSIONWARE_CORPUS`` environment variable, then the packaged demonstration
corpus.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from .dotexport import to_dot
from .errors import InputError, ModelError
from .fixtures import data_dir
from .graph import SGraph, trace_down, trace_up
from .hazards import critical_subsystems, validate
from .model_io import dumps_model, load_model, save_model
from .patterns import apply, load_application, preserves_nominal
from .report import write_report
from .risk import Override, Weights, load_candidates, rank_variants
from .sim import exact, load_scenario, run
from .surface import annotate_chains, attack_surface, exploit_chains
from .threatdb import ThreatCorpus, load_corpus, map_component

__all__ = ["main", "build_parser", "ENV_CORPUS"]

ENV_CORPUS = "MISSIONWARE_CORPUS"


def _emit(doc: Any) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _resolve_corpus(path: str | None) -> ThreatCorpus:
    if path is None:
        path = os.environ.get(ENV_CORPUS) or str(data_dir() / "corpus.json")
    return load_corpus(path)


def _parse_weights(text: str | None) -> Weights | None:
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 3:
        raise InputError(
            "BadWeights", f"expected three comma-separated weights, got {text!r}"
        )
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise InputError("BadWeights", f"weights must be numbers, got {text!r}")
    weights = Weights(*values)
    weights.validate()
    return weights


def _parse_overrides(specs: Sequence[str]) -> dict[str, Override]:
    partial: dict[str, dict[str, float | None]] = {}
    for spec in specs:
        loss, eq, rest = spec.partition("=")
        key, colon, value = rest.partition(":")
        if not eq or not colon or not loss:
            raise InputError(
                "BadParams",
                f"override must look like LOSS=complexity:X or LOSS=mitigability:Y, got {spec!r}",
            )
        if key not in ("complexity", "mitigability"):
            raise InputError("BadParams", f"unknown override key {key!r}")
        try:
            number = float(value)
        except ValueError:
            raise InputError("BadParams", f"override value must be a number, got {value!r}")
        partial.setdefault(loss, {"complexity": None, "mitigability": None})[key] = number
    return {
        loss: Override(
            attack_complexity=entry["complexity"], mitigability=entry["mitigability"]
        )
        for loss, entry in partial.items()
    }


def _hit_lines(hits) -> list[str]:
    lines = []
    for hit in hits:
        origin = "derived via " + " -> ".join(hit.derivation) if hit.derived else "direct"
        lines.append(f"  {hit.record_id:<16} {hit.score:>10.4f}  {origin}")
    return lines


# -- subcommand handlers -----------------------------------------------------


def _cmd_validate(args: argparse.Namespace) -> int:
    g = load_model(args.model)
    report = validate(g)
    if args.format == "data":
        _emit(report.to_document())
    else:
        for finding in report.findings:
            subject = f" [{finding.subject}]" if finding.subject else ""
            print(f"{finding.severity}: {finding.code}{subject}: {finding.message}")
        print(f"analysis ready: {'yes' if report.analysis_ready else 'no'}")
    return 0 if report.analysis_ready else 1


def _cmd_trace(args: argparse.Namespace) -> int:
    g = load_model(args.model)
    if args.from_id is not None:
        result = trace_up(g, args.from_id)
        if args.format == "data":
            _emit(
                {
                    "component": args.from_id,
                    "hazards": list(result.hazards),
                    "losses": list(result.losses),
                }
            )
        else:
            print(f"hazards reachable from {args.from_id}:")
            for h in result.hazards:
                print(f"  {h}")
            print("losses:")
            for l in result.losses:
                print(f"  {l}")
    else:
        components = trace_down(g, args.to_id)
        if args.format == "data":
            _emit({"loss": args.to_id, "components": list(components)})
        else:
            print(f"subsystems contributing to {args.to_id}:")
            for c in components:
                print(f"  {c}")
    return 0


def _cmd_threats(args: argparse.Namespace) -> int:
    g = load_model(args.model)
    corpus = _resolve_corpus(args.corpus)
    ids = [args.component] if args.component else list(g.components())
    mappings = [
        map_component(corpus, g.node(nid), top_k=args.top_k, threshold=args.threshold)
        for nid in ids
    ]
    if args.format == "data":
        _emit({"mappings": [m.to_document() for m in mappings]})
    else:
        for mapping in mappings:
            print(f"{mapping.component}:")
            for line in _hit_lines(mapping.hits):
                print(line)
    return 0


def _cmd_surface(args: argparse.Namespace) -> int:
    g = load_model(args.model)
    corpus = _resolve_corpus(args.corpus)
    surface = attack_surface(g, corpus, top_k=args.top_k, threshold=args.threshold)
    if args.format == "data":
        _emit(surface.to_document())
    else:
        for entry in surface.entries:
            print(f"entry point {entry.entry}:")
            for line in _hit_lines(entry.mapping.hits):
                print(line)
    return 0


def _cmd_chains(args: argparse.Namespace) -> int:
    g = load_model(args.model)
    critical = critical_subsystems(g)
    chains = exploit_chains(g, critical, max_len=args.max_len)
    if args.annotate:
        corpus = _resolve_corpus(args.corpus)
        chains = annotate_chains(
            chains, corpus, g, top_k=args.top_k, threshold=args.threshold
        )
    if args.format == "data":
        _emit({"chains": [c.to_document() for c in chains]})
    else:
        for chain in chains:
            print(f"{chain.length} hops: {' -> '.join(chain.path)}")
        print(f"total: {len(chains)} chains into {len(critical.components)} critical subsystems")
    return 0


def _cmd_apply(args: argparse.Namespace) -> int:
    g = load_model(args.model)
    app = load_application(args.pattern)
    rewritten = apply(g, app)
    preserved = preserves_nominal(g, rewritten)
    if args.out:
        save_model(rewritten, args.out)
    if args.format == "data":
        if args.out:
            _emit(
                {
                    "applied": app.describe(),
                    "out": str(args.out),
                    "preserves_nominal": preserved,
                }
            )
        else:
            sys.stdout.write(dumps_model(rewritten))
    else:
        added = sorted(set(rewritten.nodes) - set(g.nodes))
        removed = sorted(set(g.nodes) - set(rewritten.nodes))
        print(f"applied {app.describe()}")
        print(f"added nodes: {', '.join(added) if added else '(none)'}")
        print(f"removed nodes: {', '.join(removed) if removed else '(none)'}")
        print(f"nominal behavior preserved: {'yes' if preserved else 'no'}")
        if args.out:
            print(f"wrote {args.out}")
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    g = load_model(args.model)
    candidates = load_candidates(args.candidates) if args.candidates else ()
    ranking = rank_variants(
        g,
        list(candidates),
        weights=_parse_weights(args.weights),
        overrides=_parse_overrides(args.override),
        max_len=args.max_len,
        aggregate=args.aggregate,
    )
    if args.format == "data":
        _emit(ranking.to_document())
    else:
        front = set(ranking.front)
        for i, variant in enumerate(ranking.variants):
            marker = "*" if i in front else " "
            print(
                f"{marker} {variant.name:<20} aggregate={variant.aggregate:.4f} "
                f"cost={variant.total_cost:g}"
            )
            for loss in sorted(variant.scores):
                s = variant.scores[loss]
                complexity = "unreachable" if s.attack_complexity == float("inf") else f"{s.attack_complexity:g}"
                print(
                    f"    {loss}: scalar={s.scalar:.4f} severity={s.severity} "
                    f"complexity={complexity} mitigability={s.mitigability:g}"
                )
        print("(* = on the cost/risk efficient front)")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    g = load_model(args.model)
    scenario = load_scenario(args.scenario)
    if args.exact:
        result = exact(g, scenario)
        doc = result.to_document()
        if args.format == "data":
            _emit(doc)
        else:
            for loss in sorted(result.loss_probability):
                print(f"P[{loss}] = {result.loss_probability[loss]:.6f}")
            print(f"P[detection] = {result.detection_probability:.6f}")
            print(f"({result.states} joint states enumerated)")
    else:
        result = run(g, scenario, trials=args.trials, seed=args.seed)
        if args.format == "data":
            _emit(result.to_document())
        else:
            for loss in sorted(result.loss_frequency):
                print(f"freq[{loss}] = {result.loss_frequency[loss]:.6f}")
            print(f"freq[detection] = {result.detection_frequency:.6f}")
            print(f"({result.trials} trials, seed {result.seed})")
    return 0


def _cmd_export_dot(args: argparse.Namespace) -> int:
    g = load_model(args.model)
    highlight: tuple[str, ...] = ()
    if args.highlight_critical:
        highlight = critical_subsystems(g).components
    text = to_dot(g, highlight=highlight)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    g = load_model(args.model)
    corpus = _resolve_corpus(args.corpus)
    candidates = load_candidates(args.candidates) if args.candidates else ()
    scenario = load_scenario(args.scenario) if args.scenario else None
    files = write_report(
        g,
        corpus,
        args.out,
        candidates=list(candidates),
        scenario=scenario,
        trials=args.trials,
        seed=args.seed,
        weights=_parse_weights(args.weights),
        top_k=args.top_k,
        threshold=args.threshold,
        max_len=args.max_len,
    )
    if args.format == "data":
        _emit({"files": [str(f) for f in files]})
    else:
        for f in files:
            print(f)
    return 0


# -- parser ------------------------------------------------------------------


def _add_format(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format",
        choices=("table", "data"),
        default="table",
        help="output style: human table or machine JSON",
    )


def _add_corpus_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--corpus",
        help=f"threat corpus JSON (default: ${ENV_CORPUS} or the packaged corpus)",
    )
    parser.add_argument("--top-k", type=int, default=5, help="direct hits per component")
    parser.add_argument(
        "--threshold", type=float, default=0.0, help="minimum score for a direct hit"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="missionware",
        description="Mission-aware model validation, threat mapping, and risk ranking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model and report findings")
    p.add_argument("model")
    _add_format(p)
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("trace", help="walk cause/effect links up or down")
    p.add_argument("model")
    direction = p.add_mutually_exclusive_group(required=True)
    direction.add_argument(
        "--from",
        dest="from_id",
        metavar="COMPONENT",
        help="hazards and losses reachable upward from a component",
    )
    direction.add_argument(
        "--to",
        dest="to_id",
        metavar="LOSS",
        help="subsystems reachable downward from a mission loss",
    )
    _add_format(p)
    p.set_defaults(handler=_cmd_trace)

    p = sub.add_parser("threats", help="map components to threat records")
    p.add_argument("model")
    p.add_argument("--component", help="single component id (default: all components)")
    _add_corpus_options(p)
    _add_format(p)
    p.set_defaults(handler=_cmd_threats)

    p = sub.add_parser("surface", help="map every entry point to threat records")
    p.add_argument("model")
    _add_corpus_options(p)
    _add_format(p)
    p.set_defaults(handler=_cmd_surface)

    p = sub.add_parser("chains", help="enumerate exploit chains into the critical set")
    p.add_argument("model")
    p.add_argument("--max-len", type=int, default=8, help="maximum hops per chain")
    p.add_argument(
        "--annotate", action="store_true", help="attach per-hop threat mappings"
    )
    _add_corpus_options(p)
    _add_format(p)
    p.set_defaults(handler=_cmd_chains)

    p = sub.add_parser("apply", help="rewrite a model with a protective pattern")
    p.add_argument("model")
    p.add_argument("--pattern", required=True, help="pattern application JSON")
    p.add_argument("--out", help="write the rewritten model here")
    _add_format(p)
    p.set_defaults(handler=_cmd_apply)

    p = sub.add_parser("score", help="score risk per loss and rank design variants")
    p.add_argument("model")
    p.add_argument("--candidates", help="candidates JSON of named application sets")
    p.add_argument(
        "--weights", help="severity,complexity,mitigability weights (must sum to 1)"
    )
    p.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="LOSS=KEY:VALUE",
        help="expert override, KEY is complexity or mitigability (repeatable)",
    )
    p.add_argument("--aggregate", choices=("max", "sum"), default="max")
    p.add_argument("--max-len", type=int, default=8, help="maximum hops per chain")
    _add_format(p)
    p.set_defaults(handler=_cmd_score)

    p = sub.add_parser("simulate", help="run an attack scenario against the model")
    p.add_argument("model")
    p.add_argument("--scenario", required=True, help="scenario JSON")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--exact",
        action="store_true",
        help="enumerate all joint states instead of sampling",
    )
    _add_format(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("export-dot", help="render the model as Graphviz DOT")
    p.add_argument("model")
    p.add_argument(
        "--highlight-critical",
        action="store_true",
        help="fill nodes in the critical set",
    )
    p.add_argument("--out", help="write DOT here instead of stdout")
    p.set_defaults(handler=_cmd_export_dot)

    p = sub.add_parser(
        "report", help="write CSV tables and PNG figures for the full analysis"
    )
    p.add_argument("model")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--candidates", help="candidates JSON for the variant ranking")
    p.add_argument("--scenario", help="scenario JSON to simulate")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights", help="severity,complexity,mitigability weights")
    p.add_argument("--max-len", type=int, default=8, help="maximum hops per chain")
    _add_corpus_options(p)
    _add_format(p)
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
