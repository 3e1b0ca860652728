"""Typed specification-graph core: taxonomy, truth tables, evaluation, tracing.

A graph mixes mission losses, hazardous conditions, the control structure
(controllers, actuators, sensors), physical states, and intermediate logic
nodes.  Losses, hazards, and logic nodes may carry a truth table over other
nodes; :func:`evaluate` propagates Boolean state through those tables in
dependency order, where ``True`` means "abnormal, active, or compromised" and
every unassigned leaf defaults to ``False`` ("nominal").

Traceability (:func:`trace_up` / :func:`trace_down`) follows the functional
structure: ControlAction, Feedback, and Influence edges plus truth-table input
references, each treated as a directed link.  Connectivity edges describe
digital reachability for attackers and are deliberately excluded here; they
are consumed by the attack-surface layer instead.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, NamedTuple

from .errors import InputError, ModelError

__all__ = [
    "NodeKind",
    "EdgeKind",
    "TruthTable",
    "Node",
    "Edge",
    "SGraph",
    "Activation",
    "TraceResult",
    "COMPONENT_KINDS",
    "TABLE_KINDS",
    "TRACE_KINDS",
    "build",
    "evaluate",
    "trace_up",
    "trace_down",
]


class NodeKind(str, Enum):
    """Vertex taxonomy of a specification graph."""

    MISSION_LOSS = "MissionLoss"
    HAZARD = "Hazard"
    CONTROLLER = "Controller"
    ACTUATOR = "Actuator"
    SENSOR = "Sensor"
    PHYSICAL_STATE = "PhysicalState"
    LOGIC = "Logic"


class EdgeKind(str, Enum):
    """Edge taxonomy: three functional kinds plus digital connectivity."""

    CONTROL_ACTION = "ControlAction"
    FEEDBACK = "Feedback"
    INFLUENCE = "Influence"
    CONNECTIVITY = "Connectivity"


#: Kinds that form the control structure ("component-class" nodes).
COMPONENT_KINDS = frozenset(
    {NodeKind.CONTROLLER, NodeKind.ACTUATOR, NodeKind.SENSOR}
)

#: Kinds allowed to carry a truth table.
TABLE_KINDS = frozenset({NodeKind.MISSION_LOSS, NodeKind.HAZARD, NodeKind.LOGIC})

#: Kinds accepted as the starting point of an upward trace.
TRACE_KINDS = COMPONENT_KINDS | {NodeKind.PHYSICAL_STATE}

#: Edge kinds that carry functional traceability (everything but Connectivity).
FUNCTIONAL_EDGE_KINDS = frozenset(
    {EdgeKind.CONTROL_ACTION, EdgeKind.FEEDBACK, EdgeKind.INFLUENCE}
)

_ID_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.\-]*$")

_MAX_TABLE_INPUTS = 16

# Permitted (source kind, destination kind) pairs per edge kind.
_EDGE_RULES: dict[EdgeKind, frozenset[tuple[NodeKind, NodeKind]]] = {
    EdgeKind.CONTROL_ACTION: frozenset(
        {
            (NodeKind.CONTROLLER, NodeKind.CONTROLLER),
            (NodeKind.CONTROLLER, NodeKind.ACTUATOR),
        }
    ),
    EdgeKind.FEEDBACK: frozenset(
        {
            (NodeKind.SENSOR, NodeKind.CONTROLLER),
            (NodeKind.CONTROLLER, NodeKind.CONTROLLER),
        }
    ),
    EdgeKind.INFLUENCE: frozenset(
        {
            (NodeKind.ACTUATOR, NodeKind.PHYSICAL_STATE),
            (NodeKind.PHYSICAL_STATE, NodeKind.SENSOR),
            (NodeKind.PHYSICAL_STATE, NodeKind.PHYSICAL_STATE),
        }
    ),
    EdgeKind.CONNECTIVITY: frozenset(
        (a, b) for a in COMPONENT_KINDS for b in COMPONENT_KINDS
    ),
}


@dataclass(frozen=True)
class TruthTable:
    """Total Boolean function over named inputs.

    ``rows`` holds one output per input assignment, indexed by the integer
    formed from the input bits with ``inputs[0]`` as the most significant bit.
    The serialized form keys rows by bit strings in that same input order, so
    ``"01"`` assigns ``False`` to ``inputs[0]`` and ``True`` to ``inputs[1]``.
    """

    inputs: tuple[str, ...]
    rows: tuple[bool, ...]

    def __post_init__(self) -> None:
        n = len(self.inputs)
        if not 1 <= n <= _MAX_TABLE_INPUTS:
            raise ModelError(
                "TruthTableIncomplete",
                f"truth table must have between 1 and {_MAX_TABLE_INPUTS} inputs, got {n}",
            )
        if len(set(self.inputs)) != n:
            raise ModelError(
                "TruthTableIncomplete",
                f"truth table inputs contain duplicates: {list(self.inputs)}",
            )
        if len(self.rows) != 2**n:
            raise ModelError(
                "TruthTableIncomplete",
                f"truth table over {n} inputs needs {2 ** n} rows, got {len(self.rows)}",
            )
        if not all(isinstance(v, bool) for v in self.rows):
            raise ModelError(
                "TruthTableIncomplete", "truth table rows must all be booleans"
            )

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_function(cls, inputs: Iterable[str], fn) -> TruthTable:
        """Tabulate ``fn(values)`` over every assignment of ``inputs``."""
        names = tuple(inputs)
        n = len(names)
        rows = []
        for index in range(2**n):
            values = tuple(bool((index >> (n - 1 - i)) & 1) for i in range(n))
            rows.append(bool(fn(values)))
        return cls(names, tuple(rows))

    @classmethod
    def from_rows_mapping(
        cls, inputs: Iterable[str], rows: Mapping[str, bool]
    ) -> TruthTable:
        """Build from the serialized ``{"010": false, ...}`` row form."""
        names = tuple(inputs)
        n = len(names)
        if n < 1:
            raise ModelError("TruthTableIncomplete", "truth table has no inputs")
        out: list[bool | None] = [None] * (2**n)
        for key, value in rows.items():
            if len(key) != n or any(c not in "01" for c in key):
                raise ModelError(
                    "TruthTableIncomplete",
                    f"row key {key!r} is not a {n}-bit string",
                )
            if not isinstance(value, bool):
                raise ModelError(
                    "TruthTableIncomplete", f"row {key!r} output must be a boolean"
                )
            index = int(key, 2)
            if out[index] is not None:
                raise ModelError(
                    "TruthTableIncomplete", f"row key {key!r} appears more than once"
                )
            out[index] = value
        missing = [i for i, v in enumerate(out) if v is None]
        if missing:
            raise ModelError(
                "TruthTableIncomplete",
                f"missing {len(missing)} of {2 ** n} rows (first: "
                f"{format(missing[0], f'0{n}b')!r})",
            )
        return cls(names, tuple(out))  # type: ignore[arg-type]

    @classmethod
    def or_of(cls, inputs: Iterable[str]) -> TruthTable:
        return cls.from_function(inputs, any)

    @classmethod
    def and_of(cls, inputs: Iterable[str]) -> TruthTable:
        return cls.from_function(inputs, all)

    @classmethod
    def identity(cls, input_id: str) -> TruthTable:
        return cls((input_id,), (False, True))

    @classmethod
    def majority(cls, inputs: Iterable[str]) -> TruthTable:
        """True when at least half the inputs (rounded up) are true."""
        names = tuple(inputs)
        quorum = (len(names) + 1) // 2
        return cls.from_function(names, lambda vs: sum(vs) >= quorum)

    @classmethod
    def not_all_equal(cls, inputs: Iterable[str]) -> TruthTable:
        """True when the inputs disagree (some true, some false)."""
        return cls.from_function(inputs, lambda vs: 0 < sum(vs) < len(vs))

    # -- queries -----------------------------------------------------------

    def lookup(self, values: Iterable[bool]) -> bool:
        index = 0
        count = 0
        for v in values:
            index = (index << 1) | (1 if v else 0)
            count += 1
        if count != len(self.inputs):
            raise InputError(
                "BadParams",
                f"expected {len(self.inputs)} input values, got {count}",
            )
        return self.rows[index]

    def rows_mapping(self) -> dict[str, bool]:
        """Serialized row form with keys sorted ascending."""
        n = len(self.inputs)
        return {format(i, f"0{n}b"): v for i, v in enumerate(self.rows)}

    def depends_on(self, input_id: str) -> bool:
        """Whether flipping ``input_id`` can ever change the output."""
        pos = self.inputs.index(input_id)
        bit = 1 << (len(self.inputs) - 1 - pos)
        return any(
            self.rows[i] != self.rows[i | bit] for i in range(len(self.rows)) if not i & bit
        )

    def expand_input(self, input_id: str, replacements: Iterable[str]) -> TruthTable:
        """Replace one input with a group whose conjunction feeds the old column.

        The group stands for replicas of the original node: the function sees
        the abnormal value only when every replica is abnormal, i.e. the old
        input survives as long as any replica is sound.
        """
        group = tuple(replacements)
        pos = self.inputs.index(input_id)
        new_inputs = self.inputs[:pos] + group + self.inputs[pos + 1 :]
        if len(new_inputs) > _MAX_TABLE_INPUTS:
            raise InputError(
                "BadParams",
                f"expanding {input_id!r} would give {len(new_inputs)} inputs "
                f"(limit {_MAX_TABLE_INPUTS})",
            )

        def fn(values: tuple[bool, ...]) -> bool:
            merged = all(values[pos + i] for i in range(len(group)))
            old = values[:pos] + (merged,) + values[pos + len(group) :]
            return self.lookup(old)

        return TruthTable.from_function(new_inputs, fn)


@dataclass(frozen=True)
class Node:
    """One vertex: identity, kind, free-text label, and metadata.

    ``keywords`` and ``label`` feed threat-record matching.  ``attributes``
    holds scalar metadata; three keys have built-in meaning: ``severity``
    (1..5 ordinal, required on mission losses and forbidden elsewhere),
    ``entry_point`` (may be true only on component-class nodes), and
    ``supplier`` (free token used by supply-chain scenarios).
    """

    id: str
    kind: NodeKind
    label: str = ""
    keywords: frozenset[str] = frozenset()
    attributes: Mapping[str, object] = field(default_factory=dict)
    truth_table: TruthTable | None = None

    @property
    def severity(self) -> int | None:
        value = self.attributes.get("severity")
        return value if isinstance(value, int) and not isinstance(value, bool) else None

    @property
    def entry_point(self) -> bool:
        return bool(self.attributes.get("entry_point", False))

    @property
    def supplier(self) -> str | None:
        value = self.attributes.get("supplier")
        return value if isinstance(value, str) else None


@dataclass(frozen=True, order=True)
class Edge:
    """Directed edge; ``label`` annotates the carried action or signal."""

    src: str
    dst: str
    kind: EdgeKind
    label: str = ""


#: Result of evaluation: Boolean state for every node id.
Activation = dict[str, bool]


class TraceResult(NamedTuple):
    """Hazards and losses reachable from a component, each sorted."""

    hazards: tuple[str, ...]
    losses: tuple[str, ...]


class SGraph:
    """A validated, effectively immutable specification graph.

    Construct via :func:`build`, which enforces every structural invariant and
    precomputes the table evaluation order plus the functional-trace adjacency.
    Nodes iterate sorted by id; edges are kept sorted.
    """

    __slots__ = ("nodes", "edges", "_table_order", "_succ", "_pred")

    def __init__(
        self,
        nodes: dict[str, Node],
        edges: tuple[Edge, ...],
        table_order: tuple[str, ...],
        succ: dict[str, tuple[str, ...]],
        pred: dict[str, tuple[str, ...]],
    ):
        self.nodes = nodes
        self.edges = edges
        self._table_order = table_order
        self._succ = succ
        self._pred = pred

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    def __repr__(self) -> str:
        return f"SGraph({len(self.nodes)} nodes, {len(self.edges)} edges)"

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise InputError("UnknownNode", f"no node with id {node_id!r}", node_id)

    def ids_of_kind(self, *kinds: NodeKind) -> tuple[str, ...]:
        wanted = set(kinds)
        return tuple(nid for nid, n in self.nodes.items() if n.kind in wanted)

    def losses(self) -> tuple[str, ...]:
        return self.ids_of_kind(NodeKind.MISSION_LOSS)

    def hazards(self) -> tuple[str, ...]:
        return self.ids_of_kind(NodeKind.HAZARD)

    def components(self) -> tuple[str, ...]:
        return self.ids_of_kind(*COMPONENT_KINDS)

    def leaves(self) -> tuple[str, ...]:
        """Ids of nodes without a truth table (their state is assignable)."""
        return tuple(nid for nid, n in self.nodes.items() if n.truth_table is None)

    def relevant_leaves(self) -> tuple[str, ...]:
        """Leaves referenced, directly or transitively, by some truth table."""
        referenced: set[str] = set()
        for node in self.nodes.values():
            if node.truth_table is not None:
                referenced.update(node.truth_table.inputs)
        return tuple(
            nid for nid in sorted(referenced) if self.nodes[nid].truth_table is None
        )

    def table_closure(self, node_id: str) -> set[str]:
        """All ids reachable from ``node_id`` through truth-table inputs only."""
        seen: set[str] = set()
        queue = deque()
        table = self.nodes[node_id].truth_table
        if table is not None:
            queue.extend(table.inputs)
        while queue:
            current = queue.popleft()
            if current in seen:
                continue
            seen.add(current)
            inner = self.nodes[current].truth_table
            if inner is not None:
                queue.extend(inner.inputs)
        return seen


def _check_node(node: Node) -> None:
    if not isinstance(node.id, str) or not _ID_RE.match(node.id):
        raise ModelError(
            "InvalidNode", f"node id {node.id!r} is not a valid token", str(node.id)
        )
    severity = node.attributes.get("severity")
    if node.kind is NodeKind.MISSION_LOSS:
        if (
            not isinstance(severity, int)
            or isinstance(severity, bool)
            or not 1 <= severity <= 5
        ):
            raise ModelError(
                "InvalidNode",
                f"mission loss {node.id!r} needs an integer severity in 1..5",
                node.id,
            )
    elif severity is not None:
        raise ModelError(
            "InvalidNode",
            f"node {node.id!r} of kind {node.kind.value} must not carry severity",
            node.id,
        )
    entry = node.attributes.get("entry_point")
    if entry is not None and not isinstance(entry, bool):
        raise ModelError(
            "InvalidNode", f"node {node.id!r} entry_point must be a boolean", node.id
        )
    if entry is True and node.kind not in COMPONENT_KINDS:
        raise ModelError(
            "InvalidNode",
            f"node {node.id!r} of kind {node.kind.value} cannot be an entry point",
            node.id,
        )
    for key, value in node.attributes.items():
        if not isinstance(key, str):
            raise ModelError(
                "InvalidNode", f"node {node.id!r} has a non-string attribute key", node.id
            )
        if not isinstance(value, (str, int, float, bool)):
            raise ModelError(
                "InvalidNode",
                f"node {node.id!r} attribute {key!r} must be a scalar",
                node.id,
            )
    if node.truth_table is not None and node.kind not in TABLE_KINDS:
        raise ModelError(
            "InvalidNode",
            f"node {node.id!r} of kind {node.kind.value} cannot carry a truth table",
            node.id,
        )


def _table_order(nodes: dict[str, Node]) -> tuple[str, ...]:
    """Kahn topological order over truth-table dependencies."""
    table_ids = [nid for nid, n in nodes.items() if n.truth_table is not None]
    remaining_deps = {
        nid: {i for i in nodes[nid].truth_table.inputs if nodes[i].truth_table is not None}
        for nid in table_ids
    }
    dependants: dict[str, list[str]] = {nid: [] for nid in table_ids}
    for nid, deps in remaining_deps.items():
        for dep in deps:
            dependants[dep].append(nid)
    ready = deque(sorted(nid for nid, deps in remaining_deps.items() if not deps))
    order: list[str] = []
    while ready:
        current = ready.popleft()
        order.append(current)
        for nxt in dependants[current]:
            remaining_deps[nxt].discard(current)
            if not remaining_deps[nxt]:
                ready.append(nxt)
    if len(order) != len(table_ids):
        stuck = sorted(nid for nid, deps in remaining_deps.items() if deps)
        raise ModelError(
            "LogicCycle",
            f"truth-table dependencies form a cycle through {stuck[0]!r}",
            stuck[0],
        )
    return tuple(order)


def build(nodes: Iterable[Node], edges: Iterable[Edge] = ()) -> SGraph:
    """Validate and assemble a graph.

    Raises :class:`ModelError` with codes ``DuplicateId``, ``DanglingEdge``,
    ``EdgeKindViolation``, ``LogicCycle``, ``TruthTableIncomplete``, or
    ``InvalidNode``; each names the offending element.
    """
    node_map: dict[str, Node] = {}
    for node in nodes:
        _check_node(node)
        if node.id in node_map:
            raise ModelError("DuplicateId", f"duplicate node id {node.id!r}", node.id)
        node_map[node.id] = node
    node_map = dict(sorted(node_map.items()))

    for node in node_map.values():
        if node.truth_table is None:
            continue
        for input_id in node.truth_table.inputs:
            if input_id not in node_map:
                raise ModelError(
                    "DanglingEdge",
                    f"truth table of {node.id!r} references missing node {input_id!r}",
                    node.id,
                )

    edge_list: list[Edge] = []
    for edge in edges:
        for endpoint in (edge.src, edge.dst):
            if endpoint not in node_map:
                raise ModelError(
                    "DanglingEdge",
                    f"edge {edge.src!r} -> {edge.dst!r} references missing node "
                    f"{endpoint!r}",
                    endpoint,
                )
        pair = (node_map[edge.src].kind, node_map[edge.dst].kind)
        if pair not in _EDGE_RULES[edge.kind]:
            raise ModelError(
                "EdgeKindViolation",
                f"{edge.kind.value} edge {edge.src!r} -> {edge.dst!r} joins "
                f"{pair[0].value} to {pair[1].value}",
                f"{edge.src}->{edge.dst}",
            )
        edge_list.append(edge)
    edge_list.sort()

    order = _table_order(node_map)

    succ: dict[str, set[str]] = {nid: set() for nid in node_map}
    for edge in edge_list:
        if edge.kind in FUNCTIONAL_EDGE_KINDS:
            succ[edge.src].add(edge.dst)
    for nid, node in node_map.items():
        if node.truth_table is not None:
            for input_id in node.truth_table.inputs:
                succ[input_id].add(nid)
    pred: dict[str, set[str]] = {nid: set() for nid in node_map}
    for src, dsts in succ.items():
        for dst in dsts:
            pred[dst].add(src)

    return SGraph(
        node_map,
        tuple(edge_list),
        order,
        {nid: tuple(sorted(s)) for nid, s in succ.items()},
        {nid: tuple(sorted(s)) for nid, s in pred.items()},
    )


def evaluate(g: SGraph, leaf_states: Mapping[str, bool] | None = None) -> Activation:
    """Propagate Boolean state through every truth table.

    ``leaf_states`` assigns values to table-less nodes; unassigned leaves
    default to ``False``.  Assignments to table-bearing nodes are ignored (the
    table always wins).  Unknown ids raise ``UnknownNode``.
    """
    states = dict(leaf_states or {})
    unknown = sorted(set(states) - set(g.nodes))
    if unknown:
        raise InputError(
            "UnknownNode", f"leaf state references unknown node {unknown[0]!r}", unknown[0]
        )
    values: Activation = {}
    for nid, node in g.nodes.items():
        if node.truth_table is None:
            values[nid] = bool(states.get(nid, False))
    for nid in g._table_order:
        table = g.nodes[nid].truth_table
        index = 0
        for input_id in table.inputs:
            index = (index << 1) | (1 if values[input_id] else 0)
        values[nid] = table.rows[index]
    return values


def _reach(adjacency: dict[str, tuple[str, ...]], start: str) -> set[str]:
    seen: set[str] = set()
    queue = deque(adjacency[start])
    while queue:
        current = queue.popleft()
        if current in seen:
            continue
        seen.add(current)
        queue.extend(adjacency[current])
    return seen


def trace_up(g: SGraph, component: str) -> TraceResult:
    """Hazards and losses reachable from a component or physical state."""
    node = g.node(component)
    if node.kind not in TRACE_KINDS:
        raise InputError(
            "WrongKind",
            f"cannot trace up from {component!r} of kind {node.kind.value}",
            component,
        )
    reached = _reach(g._succ, component)
    hazards = tuple(sorted(i for i in reached if g.nodes[i].kind is NodeKind.HAZARD))
    losses = tuple(sorted(i for i in reached if g.nodes[i].kind is NodeKind.MISSION_LOSS))
    return TraceResult(hazards, losses)


def trace_down(g: SGraph, loss: str) -> tuple[str, ...]:
    """Components and physical states that can contribute to a mission loss."""
    node = g.node(loss)
    if node.kind is not NodeKind.MISSION_LOSS:
        raise InputError(
            "WrongKind",
            f"cannot trace down from {loss!r} of kind {node.kind.value}",
            loss,
        )
    reached = _reach(g._pred, loss)
    return tuple(sorted(i for i in reached if g.nodes[i].kind in TRACE_KINDS))
