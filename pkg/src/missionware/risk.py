"""Scalar risk scoring per mission loss and Pareto ranking of design variants.

Risk combines three dimensions: loss severity (1..5 ordinal from the model),
attack complexity (a proxy derived from exploit chains unless an expert
overrides it), and mitigability (expert-supplied fraction, default 0).  The
scalar is

    w_s * severity / 5  +  w_c / attack_complexity  +  w_m * (1 - mitigability)

with nonnegative weights summing to one (default one third each).  The
complexity proxy for a loss is the cheapest exploit chain ending at any
component in the loss's downward trace, costing its hop count plus a penalty
per distinct protective pattern present on the path: +1 for redundancy or
voting, +2 for configuration hopping.  A loss with no such chain is treated
as unreachable: infinite complexity, zero contribution from that term.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import InputError
from .graph import NodeKind, SGraph, trace_down
from .hazards import critical_subsystems
from .patterns import (
    PatternApplication,
    PatternKind,
    application_from_document,
    apply,
    document_from_application,
    preserves_nominal,
)
from .surface import DEFAULT_MAX_LEN, ExploitChain, exploit_chains

__all__ = [
    "Weights",
    "Override",
    "RiskScore",
    "Candidate",
    "VariantScore",
    "VariantRanking",
    "PATTERN_COMPLEXITY_BONUS",
    "chain_complexity",
    "score",
    "rank_variants",
    "pareto_front",
    "candidates_from_document",
    "document_from_candidates",
    "load_candidates",
]

#: Added attack-complexity hops per protective pattern on a chain.
PATTERN_COMPLEXITY_BONUS: dict[PatternKind, float] = {
    PatternKind.DIVERSE_REDUNDANCY: 1.0,
    PatternKind.VERIFIABLE_VOTING: 1.0,
    PatternKind.PHYSICAL_CONFIG_HOPPING: 2.0,
    PatternKind.VIRTUAL_CONFIG_HOPPING: 2.0,
}

_WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Weights:
    """Nonnegative weights over (severity, complexity, mitigability), sum 1."""

    severity: float = 1.0 / 3.0
    complexity: float = 1.0 / 3.0
    mitigability: float = 1.0 / 3.0

    def validate(self) -> None:
        values = (self.severity, self.complexity, self.mitigability)
        if any(w < 0 for w in values):
            raise InputError("BadWeights", f"weights must be nonnegative: {values}")
        if abs(sum(values) - 1.0) > _WEIGHT_TOLERANCE:
            raise InputError(
                "BadWeights", f"weights must sum to 1, got {sum(values)!r}"
            )

    def to_document(self) -> dict[str, float]:
        return {
            "severity": self.severity,
            "complexity": self.complexity,
            "mitigability": self.mitigability,
        }


@dataclass(frozen=True)
class Override:
    """Expert judgment for one loss; unset fields keep the computed values."""

    attack_complexity: float | None = None
    mitigability: float | None = None

    def validate(self, loss: str) -> None:
        if self.attack_complexity is not None and self.attack_complexity <= 0:
            raise InputError(
                "BadParams",
                f"attack_complexity override for {loss!r} must be positive",
                loss,
            )
        if self.mitigability is not None and not 0.0 <= self.mitigability <= 1.0:
            raise InputError(
                "BadParams",
                f"mitigability override for {loss!r} must lie in [0, 1]",
                loss,
            )


@dataclass(frozen=True)
class RiskScore:
    loss: str
    severity: int
    attack_complexity: float
    mitigability: float
    scalar: float

    def to_document(self) -> dict[str, Any]:
        unreachable = math.isinf(self.attack_complexity)
        return {
            "loss": self.loss,
            "severity": self.severity,
            "attack_complexity": None if unreachable else self.attack_complexity,
            "unreachable": unreachable,
            "mitigability": self.mitigability,
            "scalar": self.scalar,
        }


def _patterns_on_path(g: SGraph, path: Iterable[str]) -> set[tuple[str, str]]:
    found: set[tuple[str, str]] = set()
    for nid in path:
        attrs = g.nodes[nid].attributes
        kind = attrs.get("pattern_kind")
        if isinstance(kind, str):
            found.add((kind, str(attrs.get("pattern_group", nid))))
    return found


def chain_complexity(g: SGraph, chain: ExploitChain) -> float:
    """Hop count plus the penalty of each distinct pattern on the path."""
    penalty = sum(
        PATTERN_COMPLEXITY_BONUS[PatternKind(kind)]
        for kind, _ in _patterns_on_path(g, chain.path)
    )
    return chain.length + penalty


def score(
    g: SGraph,
    chains: Sequence[ExploitChain],
    loss: str,
    overrides: Mapping[str, Override] | None = None,
    weights: Weights | None = None,
) -> RiskScore:
    """Score one mission loss against a set of enumerated exploit chains."""
    weights = weights or Weights()
    weights.validate()
    node = g.node(loss)
    if node.kind is not NodeKind.MISSION_LOSS:
        raise InputError(
            "UnknownLoss", f"{loss!r} is not a mission loss node", loss
        )
    override = (overrides or {}).get(loss, Override())
    override.validate(loss)

    if override.attack_complexity is not None:
        complexity = override.attack_complexity
    else:
        reachable = set(trace_down(g, loss))
        relevant = [c for c in chains if c.path[-1] in reachable]
        complexity = min(
            (chain_complexity(g, c) for c in relevant), default=math.inf
        )

    mitigability = override.mitigability if override.mitigability is not None else 0.0
    severity = node.severity
    complexity_term = 0.0 if math.isinf(complexity) else 1.0 / complexity
    scalar = (
        weights.severity * (severity / 5.0)
        + weights.complexity * complexity_term
        + weights.mitigability * (1.0 - mitigability)
    )
    return RiskScore(loss, severity, complexity, mitigability, scalar)


@dataclass(frozen=True)
class Candidate:
    """A named set of pattern applications to evaluate as one variant."""

    name: str
    applications: tuple[PatternApplication, ...]


@dataclass(frozen=True)
class VariantScore:
    name: str
    applications: tuple[PatternApplication, ...]
    scores: Mapping[str, RiskScore]
    total_cost: float
    aggregate: float

    def to_document(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "applications": [a.describe() for a in self.applications],
            "scores": [self.scores[loss].to_document() for loss in sorted(self.scores)],
            "total_cost": self.total_cost,
            "aggregate": self.aggregate,
        }


@dataclass(frozen=True)
class VariantRanking:
    """Variants sorted by (aggregate risk, total cost, name).

    ``front`` holds indices into ``variants`` of the Pareto-efficient entries
    over the vector (per-loss scalar risks, total cost).
    """

    variants: tuple[VariantScore, ...]
    front: tuple[int, ...]

    def to_document(self) -> dict[str, Any]:
        return {
            "variants": [v.to_document() for v in self.variants],
            "pareto_front": list(self.front),
        }


def _risk_vector(variant: VariantScore, losses: Sequence[str]) -> tuple[float, ...]:
    return tuple(variant.scores[loss].scalar for loss in losses) + (
        variant.total_cost,
    )


def pareto_front(vectors: Sequence[tuple[float, ...]]) -> tuple[int, ...]:
    """Indices of vectors not dominated by any other (minimization)."""
    front: list[int] = []
    for i, vec in enumerate(vectors):
        dominated = False
        for j, other in enumerate(vectors):
            if j == i:
                continue
            if all(o <= v for o, v in zip(other, vec)) and any(
                o < v for o, v in zip(other, vec)
            ):
                dominated = True
                break
        if not dominated:
            front.append(i)
    return tuple(front)


def rank_variants(
    g: SGraph,
    candidates: Sequence[Candidate],
    weights: Weights | None = None,
    overrides: Mapping[str, Override] | None = None,
    max_len: int = DEFAULT_MAX_LEN,
    aggregate: str = "max",
) -> VariantRanking:
    """Score the baseline plus each candidate rewrite and rank them.

    Every candidate must apply cleanly and preserve nominal behavior;
    otherwise ``InvalidCandidate`` names the failing application.
    """
    if aggregate not in ("max", "sum"):
        raise InputError("BadParams", f"unknown aggregate {aggregate!r}")
    weights = weights or Weights()
    weights.validate()
    losses = sorted(g.losses())

    scored: list[VariantScore] = []
    for candidate in (Candidate("baseline", ()), *candidates):
        variant_graph = g
        for app in candidate.applications:
            try:
                variant_graph = apply(variant_graph, app)
            except InputError as exc:
                raise InputError(
                    "InvalidCandidate",
                    f"candidate {candidate.name!r}: {app.describe()} failed: {exc}",
                    candidate.name,
                )
        if candidate.applications and not preserves_nominal(g, variant_graph):
            raise InputError(
                "InvalidCandidate",
                f"candidate {candidate.name!r} changes nominal hazard or loss behavior",
                candidate.name,
            )
        critical = critical_subsystems(variant_graph)
        chains = exploit_chains(variant_graph, critical, max_len=max_len)
        scores = {
            loss: score(variant_graph, chains, loss, overrides, weights)
            for loss in losses
        }
        total_cost = sum(app.costs.total() for app in candidate.applications)
        values = [scores[loss].scalar for loss in losses]
        agg = max(values) if aggregate == "max" else sum(values)
        scored.append(
            VariantScore(candidate.name, candidate.applications, scores, total_cost, agg)
        )

    scored.sort(key=lambda v: (v.aggregate, v.total_cost, v.name))
    front = pareto_front([_risk_vector(v, losses) for v in scored])
    return VariantRanking(tuple(scored), front)


# -- JSON interchange -------------------------------------------------------

_CANDIDATE_KEYS = {"name", "applications"}


def candidates_from_document(doc: Any) -> tuple[Candidate, ...]:
    """Parse a ``{"candidates": [...]}`` document into Candidate objects."""
    if not isinstance(doc, dict) or set(doc) != {"candidates"}:
        raise InputError(
            "SchemaError", 'candidates document must be {"candidates": [...]}'
        )
    entries = doc["candidates"]
    if not isinstance(entries, list):
        raise InputError("SchemaError", "candidates must be a list")
    out = []
    for entry in entries:
        if not isinstance(entry, dict):
            raise InputError("SchemaError", "each candidate must be an object")
        unknown = sorted(set(entry) - _CANDIDATE_KEYS)
        if unknown:
            raise InputError(
                "SchemaError", f"candidate has unknown key {unknown[0]!r}"
            )
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise InputError("SchemaError", "candidate name must be a nonempty string")
        apps = entry.get("applications")
        if not isinstance(apps, list):
            raise InputError(
                "SchemaError", f"candidate {name!r} applications must be a list"
            )
        out.append(
            Candidate(name, tuple(application_from_document(a) for a in apps))
        )
    return tuple(out)


def document_from_candidates(candidates: Iterable[Candidate]) -> dict[str, Any]:
    return {
        "candidates": [
            {
                "name": c.name,
                "applications": [document_from_application(a) for a in c.applications],
            }
            for c in candidates
        ]
    }


def load_candidates(path: str | Path) -> tuple[Candidate, ...]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError("SchemaError", f"cannot read candidates file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(
            "SchemaError", f"candidates file {path} is not valid JSON: {exc}"
        )
    return candidates_from_document(doc)
