"""Batch report: delimited tables plus rendered figures for one model.

``write_report`` runs the full analysis pipeline — validation, critical-set
extraction, threat-surface mapping, exploit-chain enumeration, variant
ranking, and (optionally) one simulated scenario — and writes every result
into an output directory as CSV files with matching PNG charts.  Rendering
uses the Agg backend so reports work on headless machines.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .graph import SGraph
from .hazards import critical_subsystems, validate
from .risk import Candidate, VariantRanking, Weights, rank_variants
from .sim import AttackScenario, SimResult, run
from .surface import DEFAULT_MAX_LEN, attack_surface, exploit_chains
from .threatdb import ThreatCorpus

__all__ = ["write_report"]


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _risk_figure(path: Path, ranking: VariantRanking, losses: Sequence[str]) -> None:
    names = [v.name for v in ranking.variants]
    positions = range(len(names))
    width = 0.8 / max(len(losses), 1)
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, loss in enumerate(losses):
        values = [v.scores[loss].scalar for v in ranking.variants]
        ax.bar([p + i * width for p in positions], values, width=width, label=loss)
    ax.set_xticks([p + width * (len(losses) - 1) / 2 for p in positions])
    ax.set_xticklabels(names, rotation=20, ha="right")
    ax.set_ylabel("risk scalar")
    ax.set_title("Per-loss risk by variant")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _pareto_figure(path: Path, ranking: VariantRanking) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    front = set(ranking.front)
    for i, variant in enumerate(ranking.variants):
        marker = "o" if i in front else "x"
        color = "tab:green" if i in front else "tab:gray"
        ax.scatter(variant.total_cost, variant.aggregate, marker=marker, color=color)
        ax.annotate(variant.name, (variant.total_cost, variant.aggregate),
                    textcoords="offset points", xytext=(4, 4), fontsize=8)
    ax.set_xlabel("total cost")
    ax.set_ylabel("aggregate risk")
    ax.set_title("Cost versus risk (circles on the efficient front)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _chain_figure(path: Path, lengths: Sequence[int], max_len: int) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    bins = [b + 0.5 for b in range(max_len + 1)]
    ax.hist(lengths, bins=bins, color="tab:blue", edgecolor="black")
    ax.set_xlabel("hops")
    ax.set_ylabel("chains")
    ax.set_title("Exploit chain lengths")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _sim_figure(path: Path, result: SimResult) -> None:
    labels = sorted(result.loss_frequency) + ["detection"]
    values = [result.loss_frequency[k] for k in sorted(result.loss_frequency)]
    values.append(result.detection_frequency)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(labels, values, color="tab:red")
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel("frequency")
    ax.set_title(f"Scenario outcome over {result.trials} trials")
    ax.tick_params(axis="x", rotation=20)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def write_report(
    g: SGraph,
    corpus: ThreatCorpus,
    out_dir: str | Path,
    candidates: Sequence[Candidate] = (),
    scenario: AttackScenario | None = None,
    trials: int = 2000,
    seed: int = 0,
    weights: Weights | None = None,
    top_k: int = 5,
    threshold: float = 0.0,
    max_len: int = DEFAULT_MAX_LEN,
) -> tuple[Path, ...]:
    """Write the full analysis report and return the created paths, sorted."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    created: list[Path] = []

    def emit_csv(name: str, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
        path = out / name
        _write_csv(path, header, rows)
        created.append(path)

    report = validate(g)
    emit_csv(
        "validation.csv",
        ("severity", "code", "subject", "message"),
        ((f.severity, f.code, f.subject, f.message) for f in report.findings),
    )

    critical = critical_subsystems(g)
    emit_csv(
        "critical.csv",
        ("component", "hazard", "loss"),
        (
            (component, hazard, loss)
            for component in critical.components
            for hazard, loss in critical.justification[component]
        ),
    )

    surface = attack_surface(g, corpus, top_k=top_k, threshold=threshold)
    emit_csv(
        "surface.csv",
        ("entry", "record", "score", "derived", "derivation"),
        (
            (entry.entry, hit.record_id, f"{hit.score:.6f}", hit.derived,
             " -> ".join(hit.derivation))
            for entry in surface.entries
            for hit in entry.mapping.hits
        ),
    )

    chains = exploit_chains(g, critical, max_len=max_len)
    emit_csv(
        "chains.csv",
        ("index", "length", "path"),
        (
            (i, chain.length, " -> ".join(chain.path))
            for i, chain in enumerate(chains)
        ),
    )
    lengths = [chain.length for chain in chains]

    ranking = rank_variants(g, candidates, weights=weights, max_len=max_len)
    losses = sorted(g.losses())
    emit_csv(
        "scores.csv",
        ("variant", "loss", "severity", "attack_complexity", "mitigability", "scalar"),
        (
            (
                v.name,
                loss,
                v.scores[loss].severity,
                v.scores[loss].attack_complexity,
                v.scores[loss].mitigability,
                f"{v.scores[loss].scalar:.6f}",
            )
            for v in ranking.variants
            for loss in losses
        ),
    )
    front = set(ranking.front)
    emit_csv(
        "ranking.csv",
        ("variant", "aggregate", "total_cost", "pareto"),
        (
            (v.name, f"{v.aggregate:.6f}", v.total_cost, i in front)
            for i, v in enumerate(ranking.variants)
        ),
    )

    sim_result = None
    if scenario is not None:
        sim_result = run(g, scenario, trials=trials, seed=seed)
        rows = [
            (f"loss_frequency[{loss}]", sim_result.loss_frequency[loss])
            for loss in sorted(sim_result.loss_frequency)
        ]
        rows.append(("detection_frequency", sim_result.detection_frequency))
        rows.append(("trials", sim_result.trials))
        rows.append(("seed", sim_result.seed))
        emit_csv("simulation.csv", ("quantity", "value"), rows)

    figures = [
        (out / "risk_scalars.png", lambda p: _risk_figure(p, ranking, losses)),
        (out / "pareto_front.png", lambda p: _pareto_figure(p, ranking)),
        (out / "chain_lengths.png", lambda p: _chain_figure(p, lengths, max_len)),
    ]
    if sim_result is not None:
        figures.append((out / "simulation.png", lambda p: _sim_figure(p, sim_result)))
    for path, render in figures:
        render(path)
        created.append(path)

    return tuple(sorted(created))
