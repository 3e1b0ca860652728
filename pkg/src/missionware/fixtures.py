"""Built-in demonstration model plus access to the packaged data files.

The model is a small reconnaissance drone tasked with imaging wildfire hot
spots.  Two mission losses anchor it: misallocation of fire-service resources
(triggered by imagery of the wrong area) and loss of reconnaissance integrity
(triggered by corruption of the imagery feed).  The component roster is
deliberately worded so that the bundled threat corpus produces meaningful
matches — the GPS receiver descriptor, for example, shares rare tokens with a
real navigation-driver vulnerability record.
"""

from __future__ import annotations

from pathlib import Path

from .graph import Edge, EdgeKind, Node, NodeKind, SGraph, TruthTable, build
from .model_io import load_model
from .threatdb import ThreatCorpus, load_corpus

__all__ = [
    "uav_model",
    "data_dir",
    "packaged_model",
    "packaged_corpus",
]


def data_dir() -> Path:
    """Directory holding the packaged JSON data files."""
    return Path(__file__).resolve().parent / "data"


def packaged_model() -> "SGraph":
    return load_model(data_dir() / "uav.json")


def packaged_corpus() -> ThreatCorpus:
    return load_corpus(data_dir() / "corpus.json")


def uav_model() -> SGraph:
    """The demonstration drone model, built programmatically."""
    nodes = [
        Node(
            "gps",
            NodeKind.SENSOR,
            label="GPS receiver",
            keywords=frozenset(
                {"gps", "navigation", "driver", "mediatek", "android", "receiver"}
            ),
            attributes={"entry_point": True},
        ),
        Node(
            "attitude_sensor",
            NodeKind.SENSOR,
            label="Attitude sensing unit",
            keywords=frozenset({"imu", "gyroscope", "accelerometer", "attitude"}),
        ),
        Node(
            "flight_controller",
            NodeKind.CONTROLLER,
            label="Flight controller",
            keywords=frozenset(
                {"autopilot", "microcontroller", "firmware", "realtime"}
            ),
            attributes={"supplier": "vendorA"},
        ),
        Node(
            "control_surfaces",
            NodeKind.ACTUATOR,
            label="Control surface servos",
            keywords=frozenset({"servo", "actuator", "pwm", "elevon"}),
        ),
        Node(
            "imaging_payload",
            NodeKind.ACTUATOR,
            label="Imaging payload",
            keywords=frozenset({"camera", "imaging", "optical", "firmware"}),
        ),
        Node(
            "radio_module",
            NodeKind.SENSOR,
            label="Telemetry radio module",
            keywords=frozenset({"radio", "rf", "telemetry", "mavlink", "wireless"}),
            attributes={"entry_point": True},
        ),
        Node(
            "comms_link",
            NodeKind.CONTROLLER,
            label="Payload data link processor",
            keywords=frozenset({"datalink", "protocol", "streaming", "network"}),
            attributes={"supplier": "vendorB"},
        ),
        Node(
            "media_server",
            NodeKind.CONTROLLER,
            label="Onboard media server",
            keywords=frozenset({"linux", "server", "media", "storage", "streaming"}),
            attributes={"supplier": "vendorC"},
        ),
        Node(
            "position_incorrect",
            NodeKind.PHYSICAL_STATE,
            label="Vehicle position deviates from plan",
        ),
        Node(
            "payload_activated",
            NodeKind.PHYSICAL_STATE,
            label="Imaging payload is capturing",
        ),
        Node(
            "uca_payload_out_of_sequence",
            NodeKind.LOGIC,
            label="Imaging commanded at the wrong point in the mission",
            truth_table=TruthTable.or_of(
                ["gps", "attitude_sensor", "flight_controller"]
            ),
        ),
        Node(
            "uca_control_surfaces_manipulated",
            NodeKind.LOGIC,
            label="Control surfaces driven against the mission plan",
            truth_table=TruthTable.or_of(["flight_controller", "control_surfaces"]),
        ),
        Node(
            "hazard_wrong_area_imaged",
            NodeKind.HAZARD,
            label=(
                "Incorrect latitude-longitude values combined with activation "
                "of the imaging payload"
            ),
            truth_table=TruthTable.from_function(
                [
                    "position_incorrect",
                    "payload_activated",
                    "uca_payload_out_of_sequence",
                    "uca_control_surfaces_manipulated",
                ],
                lambda v: (v[0] and v[1]) or v[2] or v[3],
            ),
        ),
        Node(
            "hazard_corrupt_imagery",
            NodeKind.HAZARD,
            label="Imagery feed corrupted or diverted in transit",
            truth_table=TruthTable.or_of(["media_server", "comms_link"]),
        ),
        Node(
            "loss_fire_misallocation",
            NodeKind.MISSION_LOSS,
            label="Inappropriate allocation of suppression resources by fire service",
            attributes={"severity": 5},
            truth_table=TruthTable.identity("hazard_wrong_area_imaged"),
        ),
        Node(
            "loss_recon_integrity",
            NodeKind.MISSION_LOSS,
            label="Reconnaissance product can no longer be trusted",
            attributes={"severity": 4},
            truth_table=TruthTable.identity("hazard_corrupt_imagery"),
        ),
    ]
    edges = [
        Edge("flight_controller", "control_surfaces", EdgeKind.CONTROL_ACTION, "servo commands"),
        Edge("flight_controller", "imaging_payload", EdgeKind.CONTROL_ACTION, "capture trigger"),
        Edge("gps", "flight_controller", EdgeKind.FEEDBACK, "position fix"),
        Edge("attitude_sensor", "flight_controller", EdgeKind.FEEDBACK, "attitude estimate"),
        Edge("radio_module", "comms_link", EdgeKind.FEEDBACK, "uplink frames"),
        Edge("flight_controller", "comms_link", EdgeKind.FEEDBACK, "telemetry stream"),
        Edge("control_surfaces", "position_incorrect", EdgeKind.INFLUENCE),
        Edge("imaging_payload", "payload_activated", EdgeKind.INFLUENCE),
        Edge("position_incorrect", "gps", EdgeKind.INFLUENCE),
        Edge("radio_module", "comms_link", EdgeKind.CONNECTIVITY),
        Edge("comms_link", "flight_controller", EdgeKind.CONNECTIVITY),
        Edge("gps", "flight_controller", EdgeKind.CONNECTIVITY),
        Edge("flight_controller", "imaging_payload", EdgeKind.CONNECTIVITY),
        Edge("imaging_payload", "media_server", EdgeKind.CONNECTIVITY),
    ]
    return build(nodes, edges)
