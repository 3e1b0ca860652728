"""Resilience design patterns as graph rewrites.

Four catalog patterns operate on component-class nodes:

* ``DiverseRedundancy`` replaces the target with n replicas that inherit its
  edges, keywords, and attributes (optionally stamped with distinct values of
  a diversity attribute such as ``supplier``).  Every truth table that read
  the target now reads the replica group, combined so the abnormal value
  requires every replica to be abnormal — the function survives while any
  replica is sound.
* ``VerifiableVoting`` is redundancy plus instrumentation: a majority-voter
  logic node over the replicas and a companion disagreement detector that
  fires whenever the replicas do not all agree.
* ``PhysicalConfigHopping`` / ``VirtualConfigHopping`` add a hop controller
  that, under simulation, hands control to one uniformly chosen replica per
  step; the virtual variant marks replicas ``virtual`` and shares the target's
  supplier unless diversity is requested.

:func:`preserves_nominal` checks a rewrite against the original model by
replaying leaf assignments (replica leaves mirror the original node's value)
and comparing every hazard and loss activation.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import product
from pathlib import Path
from typing import Any

from .errors import InputError
from .graph import (
    COMPONENT_KINDS,
    Edge,
    Node,
    NodeKind,
    SGraph,
    TruthTable,
    build,
    evaluate,
)

__all__ = [
    "PatternKind",
    "PatternCosts",
    "PatternApplication",
    "apply",
    "preserves_nominal",
    "application_from_document",
    "document_from_application",
    "load_application",
    "SAMPLE_SIZE",
    "EXHAUSTIVE_LEAF_LIMIT",
]

#: Assignments drawn when a model has too many leaves to enumerate.
SAMPLE_SIZE = 4096
#: Leaf-count bound up to which the nominal check is exhaustive.
EXHAUSTIVE_LEAF_LIMIT = 12

_HOPPING_KINDS = frozenset({"PhysicalConfigHopping", "VirtualConfigHopping"})


class PatternKind(str, Enum):
    DIVERSE_REDUNDANCY = "DiverseRedundancy"
    VERIFIABLE_VOTING = "VerifiableVoting"
    PHYSICAL_CONFIG_HOPPING = "PhysicalConfigHopping"
    VIRTUAL_CONFIG_HOPPING = "VirtualConfigHopping"

    @property
    def is_hopping(self) -> bool:
        return self.value in _HOPPING_KINDS


@dataclass(frozen=True)
class PatternCosts:
    """Expert-supplied application costs; never computed by the tool."""

    financial: float = 0.0
    complexity_delta: float = 0.0
    performance_degradation: float = 0.0

    def validate(self) -> None:
        if self.financial < 0 or self.complexity_delta < 0:
            raise InputError("BadParams", "costs must be nonnegative")
        if not 0.0 <= self.performance_degradation <= 1.0:
            raise InputError(
                "BadParams", "performance_degradation must lie in [0, 1]"
            )

    def total(self) -> float:
        return self.financial + self.complexity_delta + self.performance_degradation

    def to_document(self) -> dict[str, float]:
        return {
            "financial": self.financial,
            "complexity_delta": self.complexity_delta,
            "performance_degradation": self.performance_degradation,
        }


@dataclass(frozen=True)
class PatternApplication:
    """One pattern instance: kind, target(s), parameters, and costs.

    ``target`` is a single node id to replicate, or — for the hopping kinds
    only — a list of existing nodes to treat as the hop group in place.
    """

    kind: PatternKind
    target: str | tuple[str, ...]
    replica_count: int | None = None
    diversity_attribute: str | None = None
    diversity_values: tuple[str, ...] = ()
    voter_id: str | None = None
    hop_period: int | None = None
    costs: PatternCosts = field(default_factory=PatternCosts)

    @property
    def group_mode(self) -> bool:
        return not isinstance(self.target, str)

    def describe(self) -> str:
        target = self.target if isinstance(self.target, str) else ",".join(self.target)
        return f"{self.kind.value}({target})"

    def validate(self) -> None:
        self.costs.validate()
        if self.group_mode:
            if not self.kind.is_hopping:
                raise InputError(
                    "BadParams",
                    f"{self.kind.value} requires a single target node id",
                )
            members = tuple(self.target)
            if len(members) < 2 or len(set(members)) != len(members):
                raise InputError(
                    "BadParams", "a hop group needs at least two distinct node ids"
                )
            if self.replica_count is not None and self.replica_count != len(members):
                raise InputError(
                    "BadParams",
                    "replica_count must match the hop group size when both are given",
                )
        else:
            if self.replica_count is None or self.replica_count < 2:
                raise InputError(
                    "BadParams",
                    f"replica_count must be at least 2, got {self.replica_count}",
                )
        if (self.diversity_attribute is None) != (not self.diversity_values):
            raise InputError(
                "BadParams",
                "diversity_attribute and diversity_values must be given together",
            )
        if self.diversity_values:
            expected = (
                len(tuple(self.target)) if self.group_mode else self.replica_count
            )
            if len(self.diversity_values) != expected:
                raise InputError(
                    "BadParams",
                    f"need {expected} diversity values, got {len(self.diversity_values)}",
                )
            if len(set(self.diversity_values)) != len(self.diversity_values):
                raise InputError("BadParams", "diversity values must be distinct")
        if self.kind is PatternKind.VERIFIABLE_VOTING:
            if not self.voter_id:
                raise InputError("BadParams", "VerifiableVoting requires a voter_id")
        elif self.voter_id is not None:
            raise InputError(
                "BadParams", f"{self.kind.value} does not take a voter_id"
            )
        if self.kind.is_hopping:
            if self.hop_period is None or self.hop_period < 1:
                raise InputError(
                    "BadParams",
                    f"{self.kind.value} requires a positive hop_period",
                )
        elif self.hop_period is not None:
            raise InputError(
                "BadParams", f"{self.kind.value} does not take a hop_period"
            )


def _fresh_id(g: SGraph, candidate: str) -> str:
    if candidate in g.nodes:
        raise InputError(
            "IdCollision", f"generated id {candidate!r} already exists", candidate
        )
    return candidate


def _replica_attributes(
    app: PatternApplication, target: Node, index: int, group_key: str
) -> dict[str, object]:
    attrs = dict(target.attributes)
    attrs["replica_of"] = target.id
    attrs["origin"] = target.attributes.get("origin", target.id)
    attrs["pattern_kind"] = app.kind.value
    attrs["pattern_group"] = group_key
    if app.kind is PatternKind.VIRTUAL_CONFIG_HOPPING:
        attrs["virtual"] = True
    if app.diversity_attribute is not None:
        attrs[app.diversity_attribute] = app.diversity_values[index]
    return attrs


def apply(g: SGraph, app: PatternApplication) -> SGraph:
    """Rewrite ``g`` per one pattern application; ``g`` itself is untouched.

    Raises ``UnknownTarget`` for missing targets, ``BadParams`` for invalid
    parameters (including non-component targets and tables that would exceed
    the input cap), and ``IdCollision`` when a generated id is taken.
    """
    app.validate()
    if app.group_mode:
        return _apply_group_hopping(g, app)

    target_id = app.target
    if target_id not in g.nodes:
        raise InputError(
            "UnknownTarget", f"pattern target {target_id!r} is not in the model", target_id
        )
    target = g.nodes[target_id]
    if target.kind not in COMPONENT_KINDS:
        raise InputError(
            "BadParams",
            f"pattern target {target_id!r} has kind {target.kind.value}; "
            "only controllers, actuators, and sensors can be replicated",
            target_id,
        )

    n = app.replica_count
    replica_ids = tuple(_fresh_id(g, f"{target_id}_{i}") for i in range(1, n + 1))

    nodes: list[Node] = []
    for nid, node in g.nodes.items():
        if nid == target_id:
            continue
        table = node.truth_table
        if table is not None and target_id in table.inputs:
            table = table.expand_input(target_id, replica_ids)
            node = replace(node, truth_table=table)
        nodes.append(node)
    for i, rid in enumerate(replica_ids):
        nodes.append(
            Node(
                id=rid,
                kind=target.kind,
                label=f"{target.label} (replica {i + 1})",
                keywords=target.keywords,
                attributes=_replica_attributes(app, target, i, target_id),
            )
        )

    if app.kind is PatternKind.VERIFIABLE_VOTING:
        voter_id = _fresh_id(g, app.voter_id)
        detector_id = _fresh_id(g, f"{app.voter_id}_disagreement")
        nodes.append(
            Node(
                id=voter_id,
                kind=NodeKind.LOGIC,
                label=f"majority voter over {target_id} replicas",
                attributes={"voter_for": target_id, "pattern_group": target_id},
                truth_table=TruthTable.majority(replica_ids),
            )
        )
        nodes.append(
            Node(
                id=detector_id,
                kind=NodeKind.LOGIC,
                label=f"disagreement detector over {target_id} replicas",
                attributes={
                    "disagreement_detector": True,
                    "pattern_group": target_id,
                },
                truth_table=TruthTable.not_all_equal(replica_ids),
            )
        )

    if app.kind.is_hopping:
        hop_id = _fresh_id(g, f"{target_id}_hop")
        nodes.append(
            Node(
                id=hop_id,
                kind=NodeKind.CONTROLLER,
                label=f"configuration hop controller over {target_id} replicas",
                attributes={
                    "hop_controller_for": target_id,
                    "hop_period": app.hop_period,
                    "hop_group": ",".join(replica_ids),
                    "pattern_group": target_id,
                },
            )
        )

    edges: list[Edge] = []
    for edge in g.edges:
        sources = replica_ids if edge.src == target_id else (edge.src,)
        destinations = replica_ids if edge.dst == target_id else (edge.dst,)
        for src in sources:
            for dst in destinations:
                edges.append(Edge(src, dst, edge.kind, edge.label))

    return build(nodes, edges)


def _apply_group_hopping(g: SGraph, app: PatternApplication) -> SGraph:
    members = tuple(app.target)
    for member in members:
        if member not in g.nodes:
            raise InputError(
                "UnknownTarget", f"hop group member {member!r} is not in the model", member
            )
        if g.nodes[member].kind not in COMPONENT_KINDS:
            raise InputError(
                "BadParams",
                f"hop group member {member!r} is not a component-class node",
                member,
            )
    hop_id = _fresh_id(g, f"{members[0]}_hop")

    nodes: list[Node] = []
    for nid, node in g.nodes.items():
        if nid in members:
            attrs = dict(node.attributes)
            attrs["pattern_kind"] = app.kind.value
            attrs["pattern_group"] = hop_id
            if app.kind is PatternKind.VIRTUAL_CONFIG_HOPPING:
                attrs["virtual"] = True
            if app.diversity_attribute is not None:
                attrs[app.diversity_attribute] = app.diversity_values[
                    members.index(nid)
                ]
            node = replace(node, attributes=attrs)
        nodes.append(node)
    nodes.append(
        Node(
            id=hop_id,
            kind=NodeKind.CONTROLLER,
            label=f"configuration hop controller over {', '.join(members)}",
            attributes={
                "hop_controller_for": members[0],
                "hop_period": app.hop_period,
                "hop_group": ",".join(sorted(members)),
                "pattern_group": hop_id,
            },
        )
    )
    return build(nodes, g.edges)


def _origin_in(g: SGraph, node: Node) -> str | None:
    """Which node of ``g`` this (possibly replicated) node stands for."""
    for candidate in (
        node.id,
        node.attributes.get("replica_of"),
        node.attributes.get("origin"),
    ):
        if isinstance(candidate, str) and candidate in g.nodes:
            return candidate
    return None


def preserves_nominal(
    g: SGraph, g2: SGraph, sample_size: int = SAMPLE_SIZE, seed: int = 0
) -> bool:
    """Whether ``g2`` agrees with ``g`` on every hazard and loss activation.

    Each leaf assignment of ``g`` is replayed on ``g2``; a replica leaf takes
    the value of the node it replaced, and leaves new in ``g2`` stay nominal.
    With at most :data:`EXHAUSTIVE_LEAF_LIMIT` relevant leaves every assignment
    is checked; beyond that, ``sample_size`` assignments are drawn from a
    seeded generator.  Raises ``IncomparableGraphs`` when the hazard and loss
    id sets differ.
    """
    watched = set(g.hazards()) | set(g.losses())
    if watched != set(g2.hazards()) | set(g2.losses()):
        raise InputError(
            "IncomparableGraphs",
            "the two models declare different hazard or loss nodes",
        )

    leaves = g.relevant_leaves()
    origins = {
        nid: _origin_in(g, node)
        for nid, node in g2.nodes.items()
        if node.truth_table is None
    }

    def agrees(assignment: dict[str, bool]) -> bool:
        left = evaluate(g, assignment)
        mirrored = {
            nid: assignment.get(origin, False) if origin else False
            for nid, origin in origins.items()
        }
        right = evaluate(g2, mirrored)
        return all(left[w] == right[w] for w in watched)

    if len(leaves) <= EXHAUSTIVE_LEAF_LIMIT:
        for values in product((False, True), repeat=len(leaves)):
            if not agrees(dict(zip(leaves, values))):
                return False
        return True

    rng = random.Random(seed)
    for _ in range(sample_size):
        assignment = {leaf: rng.random() < 0.5 for leaf in leaves}
        if not agrees(assignment):
            return False
    return True


# -- JSON interchange -------------------------------------------------------

_APP_KEYS = {"kind", "target", "params", "costs"}
_PARAM_KEYS = {
    "replica_count",
    "diversity_attribute",
    "diversity_values",
    "voter_id",
    "hop_period",
}
_COST_KEYS = {"financial", "complexity_delta", "performance_degradation"}


def application_from_document(doc: Any) -> PatternApplication:
    """Parse and validate one pattern-application document."""
    if not isinstance(doc, dict):
        raise InputError("SchemaError", "pattern application must be a JSON object")
    unknown = sorted(set(doc) - _APP_KEYS)
    if unknown:
        raise InputError(
            "SchemaError", f"pattern application has unknown key {unknown[0]!r}"
        )
    try:
        kind = PatternKind(doc.get("kind"))
    except ValueError:
        raise InputError(
            "SchemaError", f"unknown pattern kind {doc.get('kind')!r}"
        )
    target = doc.get("target")
    if isinstance(target, list) and all(isinstance(t, str) for t in target):
        target = tuple(target)
    elif not isinstance(target, str):
        raise InputError(
            "SchemaError", "pattern target must be a node id or a list of node ids"
        )
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise InputError("SchemaError", "pattern params must be an object")
    unknown = sorted(set(params) - _PARAM_KEYS)
    if unknown:
        raise InputError(
            "SchemaError", f"pattern params have unknown key {unknown[0]!r}"
        )
    costs_doc = doc.get("costs", {})
    if not isinstance(costs_doc, dict):
        raise InputError("SchemaError", "pattern costs must be an object")
    unknown = sorted(set(costs_doc) - _COST_KEYS)
    if unknown:
        raise InputError(
            "SchemaError", f"pattern costs have unknown key {unknown[0]!r}"
        )
    diversity_values = params.get("diversity_values", [])
    if not isinstance(diversity_values, list) or not all(
        isinstance(v, str) for v in diversity_values
    ):
        raise InputError("SchemaError", "diversity_values must be a list of strings")

    app = PatternApplication(
        kind=kind,
        target=target,
        replica_count=params.get("replica_count"),
        diversity_attribute=params.get("diversity_attribute"),
        diversity_values=tuple(diversity_values),
        voter_id=params.get("voter_id"),
        hop_period=params.get("hop_period"),
        costs=PatternCosts(
            financial=float(costs_doc.get("financial", 0.0)),
            complexity_delta=float(costs_doc.get("complexity_delta", 0.0)),
            performance_degradation=float(
                costs_doc.get("performance_degradation", 0.0)
            ),
        ),
    )
    app.validate()
    return app


def document_from_application(app: PatternApplication) -> dict[str, Any]:
    params: dict[str, Any] = {}
    if app.replica_count is not None:
        params["replica_count"] = app.replica_count
    if app.diversity_attribute is not None:
        params["diversity_attribute"] = app.diversity_attribute
        params["diversity_values"] = list(app.diversity_values)
    if app.voter_id is not None:
        params["voter_id"] = app.voter_id
    if app.hop_period is not None:
        params["hop_period"] = app.hop_period
    return {
        "kind": app.kind.value,
        "target": app.target if isinstance(app.target, str) else list(app.target),
        "params": params,
        "costs": app.costs.to_document(),
    }


def load_application(path: str | Path) -> PatternApplication:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError("SchemaError", f"cannot read pattern file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError("SchemaError", f"pattern file {path} is not valid JSON: {exc}")
    return application_from_document(doc)
