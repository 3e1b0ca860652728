"""Monte Carlo attack simulation with an exact enumeration twin.

Three scenario kinds set the initially compromised components:

* ``SupplyChain(attribute, value)`` — every component whose attribute matches
  the value (one tainted vendor poisons all of its parts at once);
* ``NetworkIntrusion(entry, hop_probability)`` — percolation from the entry
  node: each Connectivity edge is independently traversable with the given
  probability and everything reachable over traversable edges falls;
* ``Insider(component)`` — exactly the named component.

Configuration hopping interacts with the step clock: each hop group activates
one uniformly chosen replica per step over the scenario horizon, and the group
is observed at ``critical_step`` — every replica leaf then mirrors the state
of the replica active at that step, so a compromised replica only matters if
it holds control at the moment that counts.

Reproducibility: trial ``i`` of :func:`run` draws from
``numpy.random.Generator(PCG64(SeedSequence(entropy=seed, spawn_key=(i,))))``.
Within a trial the draw order is fixed — one uniform per Connectivity edge in
sorted order (network scenarios only), then ``horizon`` uniform integers per
hop group in sorted group order — so results are bit-exact for a given seed
regardless of platform.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from enum import Enum
from itertools import product
from pathlib import Path
from typing import Any, Iterator

import numpy as np

from .errors import InputError
from .graph import COMPONENT_KINDS, EdgeKind, SGraph, evaluate
from .hazards import require_ready

__all__ = [
    "ScenarioKind",
    "AttackScenario",
    "SimResult",
    "ExactResult",
    "run",
    "exact",
    "scenario_from_document",
    "document_from_scenario",
    "load_scenario",
    "STATE_SPACE_LIMIT",
]

#: Largest number of joint states :func:`exact` will enumerate.
STATE_SPACE_LIMIT = 2**20


class ScenarioKind(str, Enum):
    SUPPLY_CHAIN = "SupplyChain"
    NETWORK_INTRUSION = "NetworkIntrusion"
    INSIDER = "Insider"


@dataclass(frozen=True)
class AttackScenario:
    """One attack setup plus the step clock (horizon, critical step)."""

    kind: ScenarioKind
    attribute: str | None = None
    value: str | None = None
    entry: str | None = None
    hop_probability: float | None = None
    component: str | None = None
    horizon: int = 1
    critical_step: int = 1

    @classmethod
    def supply_chain(
        cls, attribute: str, value: str, horizon: int = 1, critical_step: int = 1
    ) -> AttackScenario:
        return cls(
            ScenarioKind.SUPPLY_CHAIN,
            attribute=attribute,
            value=value,
            horizon=horizon,
            critical_step=critical_step,
        )

    @classmethod
    def network_intrusion(
        cls, entry: str, hop_probability: float, horizon: int = 1, critical_step: int = 1
    ) -> AttackScenario:
        return cls(
            ScenarioKind.NETWORK_INTRUSION,
            entry=entry,
            hop_probability=hop_probability,
            horizon=horizon,
            critical_step=critical_step,
        )

    @classmethod
    def insider(
        cls, component: str, horizon: int = 1, critical_step: int = 1
    ) -> AttackScenario:
        return cls(
            ScenarioKind.INSIDER,
            component=component,
            horizon=horizon,
            critical_step=critical_step,
        )

    def validate(self, g: SGraph) -> None:
        if self.horizon < 1:
            raise InputError("BadScenario", f"horizon must be at least 1, got {self.horizon}")
        if not 1 <= self.critical_step <= self.horizon:
            raise InputError(
                "BadScenario",
                f"critical_step must lie in 1..{self.horizon}, got {self.critical_step}",
            )
        if self.kind is ScenarioKind.SUPPLY_CHAIN:
            if not self.attribute or self.value is None:
                raise InputError(
                    "BadScenario", "supply-chain scenarios need attribute and value"
                )
            carriers = [
                nid
                for nid, node in g.nodes.items()
                if node.kind in COMPONENT_KINDS and self.attribute in node.attributes
            ]
            if not carriers:
                raise InputError(
                    "UnknownReference",
                    f"no component carries attribute {self.attribute!r}",
                    self.attribute,
                )
        elif self.kind is ScenarioKind.NETWORK_INTRUSION:
            if self.entry is None or self.hop_probability is None:
                raise InputError(
                    "BadScenario",
                    "network-intrusion scenarios need entry and hop_probability",
                )
            if not 0.0 < self.hop_probability <= 1.0:
                raise InputError(
                    "BadScenario",
                    f"hop_probability must lie in (0, 1], got {self.hop_probability}",
                )
            if self.entry not in g.nodes:
                raise InputError(
                    "UnknownReference", f"entry {self.entry!r} is not in the model", self.entry
                )
            if g.nodes[self.entry].kind not in COMPONENT_KINDS:
                raise InputError(
                    "BadScenario",
                    f"entry {self.entry!r} is not a component-class node",
                    self.entry,
                )
        else:
            if self.component is None:
                raise InputError("BadScenario", "insider scenarios need a component")
            if self.component not in g.nodes:
                raise InputError(
                    "UnknownReference",
                    f"component {self.component!r} is not in the model",
                    self.component,
                )
            if g.nodes[self.component].kind not in COMPONENT_KINDS:
                raise InputError(
                    "BadScenario",
                    f"component {self.component!r} is not a component-class node",
                    self.component,
                )


@dataclass(frozen=True)
class SimResult:
    trials: int
    seed: int
    loss_frequency: dict[str, float]
    detection_frequency: float

    def to_document(self) -> dict[str, Any]:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "loss_frequency": {k: self.loss_frequency[k] for k in sorted(self.loss_frequency)},
            "detection_frequency": self.detection_frequency,
        }


@dataclass(frozen=True)
class ExactResult:
    loss_probability: dict[str, float]
    detection_probability: float
    states: int

    def to_document(self) -> dict[str, Any]:
        return {
            "loss_probability": {
                k: self.loss_probability[k] for k in sorted(self.loss_probability)
            },
            "detection_probability": self.detection_probability,
            "states": self.states,
        }


def _connectivity_edges(g: SGraph) -> tuple[tuple[str, str], ...]:
    return tuple(
        sorted({(e.src, e.dst) for e in g.edges if e.kind is EdgeKind.CONNECTIVITY})
    )


def _hop_groups(g: SGraph) -> tuple[tuple[str, tuple[str, ...]], ...]:
    """(hop-controller id, sorted replica ids) for every hop group."""
    groups = []
    for nid, node in g.nodes.items():
        raw = node.attributes.get("hop_group")
        if isinstance(raw, str) and raw:
            members = tuple(sorted(m for m in raw.split(",") if m in g.nodes))
            if members:
                groups.append((nid, members))
    return tuple(groups)


def _base_compromised(
    g: SGraph,
    scenario: AttackScenario,
    edges: tuple[tuple[str, str], ...],
    edge_open: tuple[bool, ...] | None,
) -> set[str]:
    if scenario.kind is ScenarioKind.SUPPLY_CHAIN:
        return {
            nid
            for nid, node in g.nodes.items()
            if node.kind in COMPONENT_KINDS
            and node.attributes.get(scenario.attribute) == scenario.value
        }
    if scenario.kind is ScenarioKind.INSIDER:
        return {scenario.component}
    adjacency: dict[str, list[str]] = {}
    for (src, dst), is_open in zip(edges, edge_open):
        if is_open:
            adjacency.setdefault(src, []).append(dst)
    reached = {scenario.entry}
    queue = deque([scenario.entry])
    while queue:
        for nxt in adjacency.get(queue.popleft(), ()):
            if nxt not in reached:
                reached.add(nxt)
                queue.append(nxt)
    return reached


def _detectors(g: SGraph) -> tuple[str, ...]:
    return tuple(
        nid
        for nid, node in g.nodes.items()
        if node.attributes.get("disagreement_detector") is True
    )


def _leaves_for_state(
    g: SGraph,
    compromised: set[str],
    hop_groups: tuple[tuple[str, tuple[str, ...]], ...],
    active_choice: tuple[int, ...],
) -> dict[str, bool]:
    leaves = {nid: True for nid in compromised}
    for (_, members), choice in zip(hop_groups, active_choice):
        value = members[choice] in compromised
        for member in members:
            leaves[member] = value
    return leaves


def run(g: SGraph, scenario: AttackScenario, trials: int = 10000, seed: int = 0) -> SimResult:
    """Estimate per-loss activation frequency over seeded random trials.

    ``detection_frequency`` is the share of trials in which any disagreement
    detector fired.  Results are reproducible bit-for-bit for a given seed.
    """
    require_ready(g)
    scenario.validate(g)
    if trials < 1:
        raise InputError("BadParams", f"trials must be positive, got {trials}")

    edges = _connectivity_edges(g)
    hop_groups = _hop_groups(g)
    detectors = _detectors(g)
    losses = g.losses()
    loss_counts = {loss: 0 for loss in losses}
    detect_count = 0
    network = scenario.kind is ScenarioKind.NETWORK_INTRUSION

    for trial in range(trials):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))
        )
        edge_open = None
        if network:
            draws = rng.random(len(edges))
            edge_open = tuple(bool(d < scenario.hop_probability) for d in draws)
        compromised = _base_compromised(g, scenario, edges, edge_open)
        choices = []
        for _, members in hop_groups:
            steps = rng.integers(0, len(members), size=scenario.horizon)
            choices.append(int(steps[scenario.critical_step - 1]))
        activation = evaluate(
            g, _leaves_for_state(g, compromised, hop_groups, tuple(choices))
        )
        for loss in losses:
            if activation[loss]:
                loss_counts[loss] += 1
        if any(activation[d] for d in detectors):
            detect_count += 1

    return SimResult(
        trials=trials,
        seed=seed,
        loss_frequency={loss: loss_counts[loss] / trials for loss in losses},
        detection_frequency=detect_count / trials,
    )


def _enumerate_states(
    g: SGraph, scenario: AttackScenario
) -> Iterator[tuple[float, set[str], tuple[int, ...]]]:
    edges = _connectivity_edges(g)
    hop_groups = _hop_groups(g)
    hop_states = 1
    for _, members in hop_groups:
        hop_states *= len(members)
    network = scenario.kind is ScenarioKind.NETWORK_INTRUSION
    edge_states = 2 ** len(edges) if network else 1
    if edge_states * hop_states > STATE_SPACE_LIMIT:
        raise InputError(
            "StateSpaceTooLarge",
            f"{edge_states * hop_states} joint states exceed the "
            f"{STATE_SPACE_LIMIT} enumeration limit",
        )

    if network:
        p = scenario.hop_probability
        edge_options: Iterator[tuple[bool, ...]] = product(
            (False, True), repeat=len(edges)
        )
    else:
        edge_options = iter([()])

    hop_ranges = [range(len(members)) for _, members in hop_groups]
    for edge_open in edge_options:
        if network:
            edge_prob = 1.0
            for is_open in edge_open:
                edge_prob *= p if is_open else 1.0 - p
            compromised = _base_compromised(g, scenario, edges, edge_open)
        else:
            edge_prob = 1.0
            compromised = _base_compromised(g, scenario, edges, None)
        for choice in product(*hop_ranges):
            yield edge_prob / hop_states, compromised, choice


def exact(g: SGraph, scenario: AttackScenario) -> ExactResult:
    """Exact per-loss probability by enumerating every joint random state.

    Enumerable scenarios combine the Connectivity-edge outcomes (network
    intrusion only) with each hop group's active replica at the critical
    step; the joint count must stay within :data:`STATE_SPACE_LIMIT`.
    """
    require_ready(g)
    scenario.validate(g)
    hop_groups = _hop_groups(g)
    detectors = _detectors(g)
    losses = g.losses()
    loss_prob = {loss: 0.0 for loss in losses}
    detect_prob = 0.0
    states = 0
    for probability, compromised, choice in _enumerate_states(g, scenario):
        states += 1
        activation = evaluate(
            g, _leaves_for_state(g, compromised, hop_groups, choice)
        )
        for loss in losses:
            if activation[loss]:
                loss_prob[loss] += probability
        if any(activation[d] for d in detectors):
            detect_prob += probability
    return ExactResult(loss_prob, detect_prob, states)


# -- JSON interchange -------------------------------------------------------

_SCENARIO_KEYS = {
    "kind",
    "attribute",
    "value",
    "entry",
    "hop_probability",
    "component",
    "horizon",
    "critical_step",
}


def scenario_from_document(doc: Any) -> AttackScenario:
    if not isinstance(doc, dict):
        raise InputError("SchemaError", "scenario document must be a JSON object")
    unknown = sorted(set(doc) - _SCENARIO_KEYS)
    if unknown:
        raise InputError("SchemaError", f"scenario has unknown key {unknown[0]!r}")
    try:
        kind = ScenarioKind(doc.get("kind"))
    except ValueError:
        raise InputError("SchemaError", f"unknown scenario kind {doc.get('kind')!r}")
    horizon = doc.get("horizon", 1)
    critical_step = doc.get("critical_step", 1)
    if not isinstance(horizon, int) or not isinstance(critical_step, int):
        raise InputError("SchemaError", "horizon and critical_step must be integers")
    probability = doc.get("hop_probability")
    return AttackScenario(
        kind=kind,
        attribute=doc.get("attribute"),
        value=doc.get("value"),
        entry=doc.get("entry"),
        hop_probability=float(probability) if probability is not None else None,
        component=doc.get("component"),
        horizon=horizon,
        critical_step=critical_step,
    )


def document_from_scenario(scenario: AttackScenario) -> dict[str, Any]:
    doc: dict[str, Any] = {"kind": scenario.kind.value}
    for key in ("attribute", "value", "entry", "hop_probability", "component"):
        value = getattr(scenario, key)
        if value is not None:
            doc[key] = value
    doc["horizon"] = scenario.horizon
    doc["critical_step"] = scenario.critical_step
    return doc


def load_scenario(path: str | Path) -> AttackScenario:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError("SchemaError", f"cannot read scenario file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError("SchemaError", f"scenario file {path} is not valid JSON: {exc}")
    return scenario_from_document(doc)
