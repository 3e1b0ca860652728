"""Mission-aware modeling, validation, threat mapping, and risk ranking.

The package is organized around a typed property graph of a cyber-physical
system (:mod:`missionware.graph`), structural validation and loss tracing on
top of it (:mod:`missionware.hazards`), a searchable threat-record corpus
(:mod:`missionware.threatdb`), attack-surface and exploit-chain enumeration
(:mod:`missionware.surface`), protective design patterns applied as graph
rewrites (:mod:`missionware.patterns`), scalar risk scoring with Pareto
ranking of design variants (:mod:`missionware.risk`), and Monte Carlo attack
simulation with an exact enumeration twin (:mod:`missionware.sim`).
"""

from __future__ import annotations

from .errors import InputError, ModelError, ToolError
from .graph import (
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
from .hazards import CriticalSet, Finding, ValidationReport, critical_subsystems, validate
from .model_io import dumps_model, load_model, model_from_document, save_model
from .patterns import (
    PatternApplication,
    PatternCosts,
    PatternKind,
    apply,
    load_application,
    preserves_nominal,
)
from .risk import (
    Candidate,
    Override,
    RiskScore,
    VariantRanking,
    Weights,
    load_candidates,
    rank_variants,
    score,
)
from .sim import AttackScenario, ExactResult, ScenarioKind, SimResult, exact, load_scenario, run
from .surface import AttackSurface, ExploitChain, attack_surface, exploit_chains
from .threatdb import Hit, Mapping, ThreatCorpus, load_corpus, map_component

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ToolError",
    "InputError",
    "ModelError",
    "NodeKind",
    "EdgeKind",
    "Node",
    "Edge",
    "TruthTable",
    "SGraph",
    "build",
    "evaluate",
    "trace_up",
    "trace_down",
    "Finding",
    "ValidationReport",
    "CriticalSet",
    "validate",
    "critical_subsystems",
    "model_from_document",
    "load_model",
    "save_model",
    "dumps_model",
    "ThreatCorpus",
    "Hit",
    "Mapping",
    "load_corpus",
    "map_component",
    "AttackSurface",
    "ExploitChain",
    "attack_surface",
    "exploit_chains",
    "PatternKind",
    "PatternCosts",
    "PatternApplication",
    "apply",
    "preserves_nominal",
    "load_application",
    "Weights",
    "Override",
    "RiskScore",
    "Candidate",
    "VariantRanking",
    "score",
    "rank_variants",
    "load_candidates",
    "ScenarioKind",
    "AttackScenario",
    "SimResult",
    "ExactResult",
    "run",
    "exact",
    "load_scenario",
]
