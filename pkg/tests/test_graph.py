"""Truth-table semantics, graph construction rules, evaluation, and tracing."""

from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_eval_graph, random_ready_graph
from missionware.errors import InputError, ModelError
from missionware.graph import (
    Edge,
    EdgeKind,
    Node,
    NodeKind,
    SGraph,
    TruthTable,
    build,
    evaluate,
    trace_down,
    trace_up,
)

# --- oracles -----------------------------------------------------------------


def eval_oracle(g: SGraph, leaf_states: dict[str, bool]) -> dict[str, bool]:
    """Independent recursive evaluation by direct row lookup."""
    memo: dict[str, bool] = {}

    def value(nid: str) -> bool:
        if nid not in memo:
            node = g.nodes[nid]
            if node.truth_table is None:
                memo[nid] = bool(leaf_states.get(nid, False))
            else:
                index = 0
                for input_id in node.truth_table.inputs:
                    index = (index << 1) | int(value(input_id))
                memo[nid] = node.truth_table.rows[index]
        return memo[nid]

    return {nid: value(nid) for nid in g.nodes}


def sensitivity_oracle(g: SGraph, leaf: str) -> tuple[set[str], set[str]]:
    """Hazards/losses whose value ever changes when one leaf flips."""
    others = [l for l in g.leaves() if l != leaf]
    hazards: set[str] = set()
    losses: set[str] = set()
    for bits in itertools.product((False, True), repeat=len(others)):
        base = dict(zip(others, bits))
        low = eval_oracle(g, {**base, leaf: False})
        high = eval_oracle(g, {**base, leaf: True})
        for nid, node in g.nodes.items():
            if low[nid] != high[nid]:
                if node.kind is NodeKind.HAZARD:
                    hazards.add(nid)
                elif node.kind is NodeKind.MISSION_LOSS:
                    losses.add(nid)
    return hazards, losses


def monotone_tree_graph(rng: random.Random) -> SGraph:
    """Random AND/OR tree over disjoint leaves, topped by a hazard and a loss.

    Disjoint monotone subtrees guarantee that every leaf flip is observable
    at the root under some context, so value sensitivity coincides with
    reachability on these graphs.
    """
    n = rng.randint(2, 7)
    leaves = [f"x{i}" for i in range(n)]
    nodes = [Node(l, NodeKind.SENSOR) for l in leaves]
    counter = itertools.count()

    def combine(ids: list[str]) -> str:
        if len(ids) == 1:
            return ids[0]
        k = rng.randint(2, min(3, len(ids)))
        shuffled = ids[:]
        rng.shuffle(shuffled)
        cuts = sorted(rng.sample(range(1, len(ids)), k - 1))
        chunks = [shuffled[a:b] for a, b in zip([0, *cuts], [*cuts, len(ids)])]
        child_ids = [combine(chunk) for chunk in chunks]
        nid = f"g{next(counter)}"
        ctor = rng.choice((TruthTable.or_of, TruthTable.and_of))
        nodes.append(Node(nid, NodeKind.LOGIC, truth_table=ctor(child_ids)))
        return nid

    root = combine(leaves)
    nodes.append(Node("h0", NodeKind.HAZARD, truth_table=TruthTable.identity(root)))
    nodes.append(
        Node(
            "l0",
            NodeKind.MISSION_LOSS,
            attributes={"severity": rng.randint(1, 5)},
            truth_table=TruthTable.identity("h0"),
        )
    )
    return build(nodes)


# --- truth tables ------------------------------------------------------------


class TestTruthTable:
    def test_row_order_puts_first_input_in_the_high_bit(self):
        """Row index is formed with inputs[0] as the most significant bit."""
        table = TruthTable(("a", "b"), (False, False, True, False))
        assert table.lookup([True, False]) is True
        assert table.lookup([False, True]) is False

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_constructors_match_brute_force(self, n):
        """or_of / and_of / majority / not_all_equal agree with direct counting."""
        names = [f"x{i}" for i in range(n)]
        quorum = (n + 1) // 2
        for values in itertools.product((False, True), repeat=n):
            count = sum(values)
            assert TruthTable.or_of(names).lookup(values) == (count > 0)
            assert TruthTable.and_of(names).lookup(values) == (count == n)
            assert TruthTable.majority(names).lookup(values) == (count >= quorum)
            assert TruthTable.not_all_equal(names).lookup(values) == (0 < count < n)

    def test_identity(self):
        table = TruthTable.identity("x")
        assert table.lookup([False]) is False
        assert table.lookup([True]) is True

    @given(
        n=st.integers(min_value=1, max_value=4),
        bits=st.integers(min_value=0, max_value=2**16 - 1),
    )
    @settings(max_examples=60, deadline=None)
    def test_rows_mapping_round_trip(self, n, bits):
        """from_rows_mapping inverts rows_mapping for arbitrary tables."""
        rows = tuple(bool((bits >> i) & 1) for i in range(2**n))
        table = TruthTable(tuple(f"x{i}" for i in range(n)), rows)
        assert TruthTable.from_rows_mapping(table.inputs, table.rows_mapping()) == table

    def test_wrong_row_count_rejected(self):
        with pytest.raises(ModelError) as err:
            TruthTable(("a", "b"), (False, True))
        assert err.value.code == "TruthTableIncomplete"

    def test_duplicate_inputs_rejected(self):
        with pytest.raises(ModelError):
            TruthTable(("a", "a"), (False, False, False, True))

    def test_missing_serialized_row_rejected(self):
        with pytest.raises(ModelError) as err:
            TruthTable.from_rows_mapping(("a", "b"), {"00": False, "01": True, "10": False})
        assert "missing" in str(err.value)

    def test_input_count_limits(self):
        with pytest.raises(ModelError):
            TruthTable((), ())
        with pytest.raises(ModelError):
            TruthTable.or_of([f"x{i}" for i in range(17)])

    def test_depends_on_detects_degenerate_column(self):
        """A column that never changes the output is reported as unused."""
        table = TruthTable.from_function(("a", "b"), lambda v: v[0])
        assert table.depends_on("a")
        assert not table.depends_on("b")

    def test_expand_input_is_conjunction_over_the_group(self):
        """The expanded table sees the old column as AND of the replicas."""
        base = TruthTable.from_function(("a", "b"), lambda v: v[0] ^ v[1])
        expanded = base.expand_input("a", ("a1", "a2", "a3"))
        assert expanded.inputs == ("a1", "a2", "a3", "b")
        for values in itertools.product((False, True), repeat=4):
            merged = values[0] and values[1] and values[2]
            assert expanded.lookup(values) == base.lookup((merged, values[3]))

    def test_expand_input_respects_input_limit(self):
        base = TruthTable.or_of([f"x{i}" for i in range(10)])
        with pytest.raises(InputError) as err:
            base.expand_input("x0", tuple(f"r{i}" for i in range(8)))
        assert err.value.code == "BadParams"


# --- construction rules --------------------------------------------------------


def _loss(nid: str, input_id: str, severity: int = 3) -> Node:
    return Node(
        nid,
        NodeKind.MISSION_LOSS,
        attributes={"severity": severity},
        truth_table=TruthTable.identity(input_id),
    )


class TestBuild:
    def test_duplicate_id_rejected(self):
        with pytest.raises(ModelError) as err:
            build([Node("a", NodeKind.SENSOR), Node("a", NodeKind.ACTUATOR)])
        assert err.value.code == "DuplicateId"

    def test_dangling_table_input_rejected(self):
        nodes = [Node("h", NodeKind.HAZARD, truth_table=TruthTable.identity("ghost"))]
        with pytest.raises(ModelError) as err:
            build(nodes)
        assert err.value.code == "DanglingEdge"

    def test_dangling_edge_endpoint_rejected(self):
        nodes = [Node("s", NodeKind.SENSOR)]
        with pytest.raises(ModelError) as err:
            build(nodes, [Edge("s", "ghost", EdgeKind.CONNECTIVITY)])
        assert err.value.code == "DanglingEdge"

    def test_edge_kind_rules_enforced(self):
        nodes = [Node("s1", NodeKind.SENSOR), Node("s2", NodeKind.SENSOR)]
        with pytest.raises(ModelError) as err:
            build(nodes, [Edge("s1", "s2", EdgeKind.CONTROL_ACTION)])
        assert err.value.code == "EdgeKindViolation"

    def test_influence_cannot_leave_a_controller(self):
        nodes = [Node("c", NodeKind.CONTROLLER), Node("p", NodeKind.PHYSICAL_STATE)]
        with pytest.raises(ModelError):
            build(nodes, [Edge("c", "p", EdgeKind.INFLUENCE)])

    def test_table_reference_cycle_rejected(self):
        nodes = [
            Node("t1", NodeKind.LOGIC, truth_table=TruthTable.identity("t2")),
            Node("t2", NodeKind.LOGIC, truth_table=TruthTable.identity("t1")),
        ]
        with pytest.raises(ModelError) as err:
            build(nodes)
        assert err.value.code == "LogicCycle"

    def test_loss_requires_severity(self):
        nodes = [
            Node("s", NodeKind.SENSOR),
            Node("l", NodeKind.MISSION_LOSS, truth_table=TruthTable.identity("s")),
        ]
        with pytest.raises(ModelError) as err:
            build(nodes)
        assert err.value.code == "InvalidNode"

    @pytest.mark.parametrize("severity", [0, 6, 2.5, True])
    def test_severity_range_and_type(self, severity):
        nodes = [
            Node("s", NodeKind.SENSOR),
            Node(
                "l",
                NodeKind.MISSION_LOSS,
                attributes={"severity": severity},
                truth_table=TruthTable.identity("s"),
            ),
        ]
        with pytest.raises(ModelError):
            build(nodes)

    def test_severity_forbidden_outside_losses(self):
        with pytest.raises(ModelError):
            build([Node("s", NodeKind.SENSOR, attributes={"severity": 3})])

    def test_entry_point_only_on_components(self):
        with pytest.raises(ModelError):
            build(
                [
                    Node("s", NodeKind.SENSOR),
                    Node(
                        "h",
                        NodeKind.HAZARD,
                        attributes={"entry_point": True},
                        truth_table=TruthTable.identity("s"),
                    ),
                ]
            )

    def test_tables_forbidden_on_components(self):
        with pytest.raises(ModelError):
            build(
                [
                    Node("a", NodeKind.SENSOR),
                    Node("b", NodeKind.SENSOR, truth_table=TruthTable.identity("a")),
                ]
            )

    @pytest.mark.parametrize("bad_id", ["", "-leading", "has space", "tab\there"])
    def test_id_syntax(self, bad_id):
        with pytest.raises(ModelError):
            build([Node(bad_id, NodeKind.SENSOR)])

    def test_nodes_are_stored_sorted(self):
        g = build([Node("b", NodeKind.SENSOR), Node("a", NodeKind.SENSOR)])
        assert list(g.nodes) == ["a", "b"]

    def test_graph_equality_is_structural(self):
        nodes = [Node("a", NodeKind.SENSOR), Node("b", NodeKind.CONTROLLER)]
        edges = [Edge("a", "b", EdgeKind.FEEDBACK)]
        assert build(nodes, edges) == build(list(reversed(nodes)), edges)
        assert build(nodes, edges) != build(nodes)


# --- evaluation ----------------------------------------------------------------


class TestEvaluate:
    def test_matches_oracle_on_random_graphs_exhaustively(self):
        """evaluate agrees with recursive row lookup on every assignment."""
        rng = random.Random(1234)
        for _ in range(50):
            g = random_eval_graph(rng, max_leaves=8)
            leaves = g.leaves()
            for bits in itertools.product((False, True), repeat=len(leaves)):
                assignment = dict(zip(leaves, bits))
                assert evaluate(g, assignment) == eval_oracle(g, assignment)

    def test_defaults_all_leaves_false(self, uav):
        activation = evaluate(uav)
        assert not any(activation.values())

    def test_true_leaf_propagates(self, uav):
        activation = evaluate(uav, {"flight_controller": True})
        assert activation["uca_payload_out_of_sequence"]
        assert activation["hazard_wrong_area_imaged"]
        assert activation["loss_fire_misallocation"]
        assert not activation["loss_recon_integrity"]

    def test_unknown_leaf_rejected(self, uav):
        with pytest.raises(InputError) as err:
            evaluate(uav, {"ghost": True})
        assert err.value.code == "UnknownNode"

    def test_assignments_to_table_nodes_are_ignored(self, uav):
        forced = evaluate(uav, {"hazard_corrupt_imagery": True})
        assert forced == evaluate(uav)

    def test_pure_function_of_inputs(self, uav):
        assignment = {"gps": True, "media_server": True}
        first = evaluate(uav, assignment)
        second = evaluate(uav, assignment)
        assert first == second
        assert assignment == {"gps": True, "media_server": True}


# --- tracing ---------------------------------------------------------------------


class TestTrace:
    def test_uav_attitude_sensor_reaches_fire_loss(self, uav):
        result = trace_up(uav, "attitude_sensor")
        assert "hazard_wrong_area_imaged" in result.hazards
        assert "loss_fire_misallocation" in result.losses

    def test_uav_fire_loss_reaches_navigation(self, uav):
        components = trace_down(uav, "loss_fire_misallocation")
        for expected in ("gps", "attitude_sensor", "flight_controller", "imaging_payload"):
            assert expected in components
        assert "radio_module" not in components

    def test_isolated_component_traces_to_nothing(self):
        g = build(
            [
                Node("iso", NodeKind.SENSOR),
                Node("s", NodeKind.SENSOR),
                _loss("l", "s"),
            ]
        )
        assert trace_up(g, "iso") == ((), ())

    def test_results_are_sorted(self, uav):
        result = trace_up(uav, "flight_controller")
        assert list(result.hazards) == sorted(result.hazards)
        assert list(result.losses) == sorted(result.losses)
        assert list(trace_down(uav, "loss_recon_integrity")) == sorted(
            trace_down(uav, "loss_recon_integrity")
        )

    def test_duality_on_random_graphs(self):
        """c ∈ trace_down(ℓ) exactly when ℓ ∈ trace_up(c)."""
        rng = random.Random(99)
        for _ in range(25):
            g = random_ready_graph(rng)
            trace_kinds = g.ids_of_kind(
                NodeKind.SENSOR,
                NodeKind.ACTUATOR,
                NodeKind.CONTROLLER,
                NodeKind.PHYSICAL_STATE,
            )
            for loss in g.losses():
                down = set(trace_down(g, loss))
                for c in trace_kinds:
                    assert (c in down) == (loss in trace_up(g, c).losses)

    def test_adding_an_edge_never_shrinks_traces(self):
        rng = random.Random(7)
        for _ in range(20):
            g = random_ready_graph(rng)
            sensors = g.ids_of_kind(NodeKind.SENSOR)
            controllers = g.ids_of_kind(NodeKind.CONTROLLER)
            if not sensors or not controllers:
                continue
            extra = Edge(rng.choice(sensors), rng.choice(controllers), EdgeKind.FEEDBACK)
            bigger = build(g.nodes.values(), [*g.edges, extra])
            for c in g.components():
                before = trace_up(g, c)
                after = trace_up(bigger, c)
                assert set(before.hazards) <= set(after.hazards)
                assert set(before.losses) <= set(after.losses)
            for loss in g.losses():
                assert set(trace_down(g, loss)) <= set(trace_down(bigger, loss))

    def test_sensitivity_oracle_is_bounded_by_trace_up(self):
        """Value sensitivity never exceeds reachability on arbitrary graphs."""
        rng = random.Random(4242)
        for _ in range(40):
            g = random_eval_graph(rng, max_leaves=7)
            for leaf in g.leaves():
                hazards, losses = sensitivity_oracle(g, leaf)
                result = trace_up(g, leaf)
                assert hazards <= set(result.hazards)
                assert losses <= set(result.losses)

    def test_sensitivity_oracle_matches_trace_up_on_monotone_trees(self):
        """On cancellation-free graphs the two notions coincide exactly."""
        rng = random.Random(77)
        for _ in range(20):
            g = monotone_tree_graph(rng)
            for leaf in g.leaves():
                hazards, losses = sensitivity_oracle(g, leaf)
                result = trace_up(g, leaf)
                assert hazards == set(result.hazards)
                assert losses == set(result.losses)

    def test_unknown_and_wrong_kind_rejected(self, uav):
        with pytest.raises(InputError):
            trace_up(uav, "ghost")
        with pytest.raises(InputError) as err:
            trace_up(uav, "hazard_corrupt_imagery")
        assert err.value.code == "WrongKind"
        with pytest.raises(InputError) as err:
            trace_down(uav, "gps")
        assert err.value.code == "WrongKind"
