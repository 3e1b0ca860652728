"""Shared fixtures and random model generators.

The generators build small random graphs for oracle-based tests: evaluation
graphs (random truth tables over a handful of leaves), connectivity graphs
(random digraphs with entry points for path enumeration), and analysis-ready
graphs (loss + hazard apparatus over random components) for pattern rewrites.
"""

from __future__ import annotations

import random

import pytest

from missionware.fixtures import packaged_corpus, uav_model
from missionware.graph import Edge, EdgeKind, Node, NodeKind, SGraph, TruthTable, build


@pytest.fixture(scope="session")
def uav() -> SGraph:
    return uav_model()


@pytest.fixture(scope="session")
def corpus():
    return packaged_corpus()


def random_eval_graph(rng: random.Random, max_leaves: int = 12) -> SGraph:
    """Random DAG of truth-table nodes over component leaves."""
    leaf_kinds = (
        NodeKind.SENSOR,
        NodeKind.ACTUATOR,
        NodeKind.CONTROLLER,
        NodeKind.PHYSICAL_STATE,
    )
    n_leaves = rng.randint(1, max_leaves)
    nodes = [Node(f"c{i}", rng.choice(leaf_kinds)) for i in range(n_leaves)]
    pool = [n.id for n in nodes]
    for j in range(rng.randint(1, 6)):
        arity = rng.randint(1, min(4, len(pool)))
        inputs = rng.sample(pool, arity)
        rows = tuple(rng.random() < 0.5 for _ in range(2**arity))
        kind = rng.choice((NodeKind.LOGIC, NodeKind.HAZARD, NodeKind.MISSION_LOSS))
        attributes = {"severity": rng.randint(1, 5)} if kind is NodeKind.MISSION_LOSS else {}
        nodes.append(
            Node(
                f"t{j}",
                kind,
                attributes=attributes,
                truth_table=TruthTable(tuple(inputs), rows),
            )
        )
        pool.append(f"t{j}")
    return build(nodes)


def random_conn_graph(
    rng: random.Random, max_components: int = 10
) -> tuple[SGraph, tuple[str, ...]]:
    """Analysis-ready graph with random Connectivity edges; returns (g, targets)."""
    n = rng.randint(3, max_components)
    component_kinds = (NodeKind.SENSOR, NodeKind.ACTUATOR, NodeKind.CONTROLLER)
    components = [f"c{i}" for i in range(n)]
    entries = rng.sample(components, rng.randint(1, n))
    nodes = [
        Node(
            cid,
            rng.choice(component_kinds),
            attributes={"entry_point": True} if cid in entries else {},
        )
        for cid in components
    ]
    hazard_inputs = rng.sample(components, rng.randint(1, n))
    nodes.append(
        Node("h0", NodeKind.HAZARD, truth_table=TruthTable.or_of(sorted(hazard_inputs)))
    )
    nodes.append(
        Node(
            "l0",
            NodeKind.MISSION_LOSS,
            attributes={"severity": rng.randint(1, 5)},
            truth_table=TruthTable.identity("h0"),
        )
    )
    edges = []
    for src in components:
        for dst in components:
            if src != dst and rng.random() < 0.25:
                edges.append(Edge(src, dst, EdgeKind.CONNECTIVITY))
    targets = tuple(sorted(rng.sample(components, rng.randint(1, n))))
    return build(nodes, edges), targets


def random_ready_graph(rng: random.Random, max_leaves: int = 8) -> SGraph:
    """Analysis-ready graph suitable for pattern rewrites (≤ ``max_leaves`` leaves)."""
    n = rng.randint(2, max_leaves)
    component_kinds = (NodeKind.SENSOR, NodeKind.ACTUATOR, NodeKind.CONTROLLER)
    components = [f"c{i}" for i in range(n)]
    nodes = [
        Node(
            cid,
            rng.choice(component_kinds),
            keywords=frozenset(rng.sample(["alpha", "beta", "gamma", "delta"], 2)),
            attributes={"entry_point": True} if rng.random() < 0.4 else {},
        )
        for cid in components
    ]
    n_hazards = rng.randint(1, 2)
    for j in range(n_hazards):
        arity = rng.randint(1, min(4, n))
        inputs = rng.sample(components, arity)
        rows = [rng.random() < 0.5 for _ in range(2**arity)]
        rows[-1] = True  # all-abnormal input must be representable as hazardous
        nodes.append(
            Node(f"h{j}", NodeKind.HAZARD, truth_table=TruthTable(tuple(inputs), tuple(rows)))
        )
    hazard_ids = [f"h{j}" for j in range(n_hazards)]
    nodes.append(
        Node(
            "l0",
            NodeKind.MISSION_LOSS,
            attributes={"severity": rng.randint(1, 5)},
            truth_table=TruthTable.or_of(hazard_ids),
        )
    )
    edges = []
    for src in components:
        for dst in components:
            if src != dst and rng.random() < 0.2:
                edges.append(Edge(src, dst, EdgeKind.CONNECTIVITY))
    return build(nodes, edges)
