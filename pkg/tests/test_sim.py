"""Attack simulation: exact enumeration, Monte Carlo agreement, seeding."""

from __future__ import annotations

import json

import pytest

from missionware.errors import InputError
from missionware.fixtures import data_dir
from missionware.graph import Edge, EdgeKind, Node, NodeKind, SGraph, TruthTable, build
from missionware.patterns import (
    PatternApplication,
    PatternKind,
    apply,
    load_application,
)
from missionware.sim import (
    AttackScenario,
    ScenarioKind,
    document_from_scenario,
    exact,
    load_scenario,
    run,
    scenario_from_document,
)


def percolation_chain(length: int) -> SGraph:
    """entry -> ... -> last component, one hazard/loss pair on the last."""
    names = [f"c{i}" for i in range(length)]
    nodes = [
        Node(names[0], NodeKind.SENSOR, attributes={"entry_point": True}),
        *(Node(n, NodeKind.CONTROLLER) for n in names[1:-1]),
        Node(names[-1], NodeKind.ACTUATOR),
        Node("h", NodeKind.HAZARD, truth_table=TruthTable.identity(names[-1])),
        Node(
            "l",
            NodeKind.MISSION_LOSS,
            attributes={"severity": 3},
            truth_table=TruthTable.identity("h"),
        ),
    ]
    edges = [
        Edge(a, b, EdgeKind.CONNECTIVITY) for a, b in zip(names, names[1:])
    ]
    return build(nodes, edges)


class TestExact:
    def test_two_hop_percolation(self):
        g = percolation_chain(3)
        result = exact(g, AttackScenario.network_intrusion("c0", 0.3))
        assert result.loss_probability["l"] == pytest.approx(0.09, abs=1e-12)
        assert result.detection_probability == 0.0
        assert result.states == 4

    def test_uav_network_intrusion(self, uav):
        result = exact(uav, AttackScenario.network_intrusion("radio_module", 0.5))
        assert result.states == 32
        assert result.loss_probability["loss_fire_misallocation"] == pytest.approx(0.25)
        assert result.loss_probability["loss_recon_integrity"] == pytest.approx(0.5)
        assert result.detection_probability == 0.0

    def test_uav_supply_chain(self, uav):
        result = exact(uav, AttackScenario.supply_chain("supplier", "vendorA"))
        assert result.states == 1
        assert result.loss_probability["loss_fire_misallocation"] == 1.0
        assert result.loss_probability["loss_recon_integrity"] == 0.0

    def test_uav_insider(self, uav):
        result = exact(uav, AttackScenario.insider("media_server"))
        assert result.states == 1
        assert result.loss_probability["loss_fire_misallocation"] == 0.0
        assert result.loss_probability["loss_recon_integrity"] == 1.0

    def test_hop_group_activation_is_uniform(self, uav):
        hopped = apply(
            uav, load_application(data_dir() / "patterns" / "flight_controller_hopping.json")
        )
        result = exact(hopped, AttackScenario.insider("flight_controller_1"))
        assert result.states == 2
        assert result.loss_probability["loss_fire_misallocation"] == pytest.approx(0.5)

    def test_only_the_critical_step_matters(self, uav):
        hopped = apply(
            uav, load_application(data_dir() / "patterns" / "flight_controller_hopping.json")
        )
        short = exact(hopped, AttackScenario.insider("flight_controller_1"))
        long = exact(
            hopped,
            AttackScenario.insider("flight_controller_1", horizon=3, critical_step=2),
        )
        assert short.loss_probability == long.loss_probability
        assert short.states == long.states

    def test_state_space_limit_enforced(self):
        g = percolation_chain(22)  # 21 Connectivity edges
        with pytest.raises(InputError) as err:
            exact(g, AttackScenario.network_intrusion("c0", 0.5))
        assert err.value.code == "StateSpaceTooLarge"


class TestDiversity:
    def test_diverse_suppliers_break_the_supply_chain(self, uav):
        scenario = AttackScenario.supply_chain("supplier", "vendorA")
        guarded = apply(
            uav, load_application(data_dir() / "patterns" / "supplier_voting.json")
        )
        result = exact(guarded, scenario)
        assert result.loss_probability["loss_fire_misallocation"] == 0.0
        assert result.detection_probability == 1.0

    def test_identical_suppliers_do_not(self, uav):
        scenario = AttackScenario.supply_chain("supplier", "vendorA")
        cloned = apply(
            uav,
            PatternApplication(
                PatternKind.DIVERSE_REDUNDANCY, "flight_controller", replica_count=2
            ),
        )
        result = exact(cloned, scenario)
        assert result.loss_probability["loss_fire_misallocation"] == 1.0


class TestRun:
    def test_deterministic_scenarios_hit_the_exact_answer(self, uav):
        result = run(uav, AttackScenario.supply_chain("supplier", "vendorA"), trials=50)
        assert result.loss_frequency["loss_fire_misallocation"] == 1.0
        assert result.loss_frequency["loss_recon_integrity"] == 0.0
        assert result.detection_frequency == 0.0

    def test_monte_carlo_tracks_exact_probabilities(self, uav):
        scenario = AttackScenario.network_intrusion("radio_module", 0.5)
        truth = exact(uav, scenario)
        estimate = run(uav, scenario, trials=20000, seed=1)
        for loss, probability in truth.loss_probability.items():
            assert abs(estimate.loss_frequency[loss] - probability) <= 0.02

    def test_hop_estimate_tracks_exact(self, uav):
        hopped = apply(
            uav, load_application(data_dir() / "patterns" / "flight_controller_hopping.json")
        )
        scenario = AttackScenario.insider("flight_controller_1")
        estimate = run(hopped, scenario, trials=4000, seed=3)
        assert abs(estimate.loss_frequency["loss_fire_misallocation"] - 0.5) <= 0.03

    def test_same_seed_reproduces_bit_for_bit(self, uav):
        scenario = AttackScenario.network_intrusion("radio_module", 0.5)
        first = run(uav, scenario, trials=500, seed=7)
        second = run(uav, scenario, trials=500, seed=7)
        assert first == second
        assert first.to_document() == second.to_document()

    def test_different_seeds_draw_different_trials(self, uav):
        scenario = AttackScenario.network_intrusion("radio_module", 0.5)
        assert run(uav, scenario, trials=10000, seed=0) != run(
            uav, scenario, trials=10000, seed=1
        )

    def test_trials_must_be_positive(self, uav):
        with pytest.raises(InputError) as err:
            run(uav, AttackScenario.insider("media_server"), trials=0)
        assert err.value.code == "BadParams"


class TestScenarioValidation:
    def test_step_clock_bounds(self, uav):
        with pytest.raises(InputError) as err:
            AttackScenario.insider("media_server", horizon=0).validate(uav)
        assert err.value.code == "BadScenario"
        with pytest.raises(InputError):
            AttackScenario.insider("media_server", horizon=2, critical_step=3).validate(uav)

    def test_network_probability_bounds(self, uav):
        with pytest.raises(InputError):
            AttackScenario.network_intrusion("radio_module", 0.0).validate(uav)
        with pytest.raises(InputError):
            AttackScenario.network_intrusion("radio_module", 1.25).validate(uav)

    def test_unknown_references(self, uav):
        with pytest.raises(InputError) as err:
            AttackScenario.network_intrusion("nonexistent", 0.5).validate(uav)
        assert err.value.code == "UnknownReference"
        with pytest.raises(InputError) as err:
            AttackScenario.insider("nonexistent").validate(uav)
        assert err.value.code == "UnknownReference"
        with pytest.raises(InputError) as err:
            AttackScenario.supply_chain("warranty", "expired").validate(uav)
        assert err.value.code == "UnknownReference"

    def test_non_component_references(self, uav):
        with pytest.raises(InputError) as err:
            AttackScenario.insider("hazard_corrupt_imagery").validate(uav)
        assert err.value.code == "BadScenario"
        with pytest.raises(InputError):
            AttackScenario.network_intrusion("position_incorrect", 0.5).validate(uav)


class TestScenarioDocuments:
    def test_round_trip(self):
        scenarios = [
            AttackScenario.supply_chain("supplier", "vendorA"),
            AttackScenario.network_intrusion("radio_module", 0.5, horizon=4,
                                             critical_step=2),
            AttackScenario.insider("media_server"),
        ]
        for scenario in scenarios:
            doc = document_from_scenario(scenario)
            assert scenario_from_document(json.loads(json.dumps(doc))) == scenario

    def test_schema_rejections(self):
        with pytest.raises(InputError):
            scenario_from_document([])
        with pytest.raises(InputError):
            scenario_from_document({"kind": "Meteor"})
        with pytest.raises(InputError):
            scenario_from_document({"kind": "Insider", "component": "x", "extra": 1})
        with pytest.raises(InputError):
            scenario_from_document({"kind": "Insider", "component": "x", "horizon": "3"})

    def test_packaged_scenarios(self, uav):
        directory = data_dir() / "scenarios"
        supply = load_scenario(directory / "supply_chain_vendor_a.json")
        assert supply.kind is ScenarioKind.SUPPLY_CHAIN
        assert (supply.attribute, supply.value) == ("supplier", "vendorA")
        network = load_scenario(directory / "network_radio.json")
        assert network.kind is ScenarioKind.NETWORK_INTRUSION
        assert (network.entry, network.hop_probability) == ("radio_module", 0.5)
        insider = load_scenario(directory / "insider_media_server.json")
        assert insider.kind is ScenarioKind.INSIDER
        assert insider.component == "media_server"
        for scenario in (supply, network, insider):
            scenario.validate(uav)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(InputError) as err:
            load_scenario(tmp_path / "absent.json")
        assert err.value.code == "SchemaError"
