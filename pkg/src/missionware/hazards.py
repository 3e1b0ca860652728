"""Model validation checks and critical-subsystem derivation.

:func:`validate` runs the hazard-analysis completeness checks and reports
findings; a model with no Error-severity findings is "analysis ready" and may
feed the downstream surface, risk, and simulation layers.
:func:`critical_subsystems` lists every component or physical state that can
contribute to a mission loss, with (hazard, loss) pairs justifying each entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from .errors import ModelError
from .graph import (
    COMPONENT_KINDS,
    TRACE_KINDS,
    EdgeKind,
    NodeKind,
    SGraph,
    _reach,
    trace_up,
)

__all__ = [
    "Finding",
    "ValidationReport",
    "CriticalSet",
    "validate",
    "critical_subsystems",
    "require_ready",
]

ERROR = "Error"
WARNING = "Warning"


@dataclass(frozen=True)
class Finding:
    """One validation result: severity, stable code, subject id, message."""

    severity: str
    code: str
    subject: str
    message: str

    def to_document(self) -> dict[str, str]:
        return {
            "severity": self.severity,
            "code": self.code,
            "subject": self.subject,
            "message": self.message,
        }


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def analysis_ready(self) -> bool:
        return not any(f.severity == ERROR for f in self.findings)

    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == ERROR)

    def to_document(self) -> dict[str, Any]:
        return {
            "analysis_ready": self.analysis_ready,
            "findings": [f.to_document() for f in self.findings],
        }


@dataclass(frozen=True)
class CriticalSet:
    """Loss-contributing subsystems, most loss-coupled first.

    ``components`` is ordered by (number of distinct reachable losses
    descending, id ascending).  ``justification`` maps each component to
    sorted (hazard id, loss id) pairs; the hazard slot is empty only when a
    loss is reachable without passing a hazard.
    """

    components: tuple[str, ...]
    justification: Mapping[str, tuple[tuple[str, str], ...]]

    def to_document(self) -> dict[str, Any]:
        return {
            "components": list(self.components),
            "justification": {
                c: [[h, l] for h, l in pairs] for c, pairs in self.justification.items()
            },
        }


def validate(g: SGraph) -> ValidationReport:
    """Run the workflow checks; Error findings block further analysis."""
    findings: list[Finding] = []

    losses = g.losses()
    if not losses:
        findings.append(
            Finding(ERROR, "NO_LOSSES", "", "model declares no mission loss nodes")
        )

    for loss in losses:
        closure = g.table_closure(loss)
        if not any(g.nodes[i].kind is NodeKind.HAZARD for i in closure):
            findings.append(
                Finding(
                    ERROR,
                    "ORPHAN_LOSS",
                    loss,
                    f"loss {loss!r} is not linked to any hazard through its truth tables",
                )
            )

    for hazard in g.hazards():
        closure = g.table_closure(hazard)
        if not any(g.nodes[i].kind in TRACE_KINDS for i in closure):
            findings.append(
                Finding(
                    ERROR,
                    "ORPHAN_HAZARD",
                    hazard,
                    f"hazard {hazard!r} is not linked to any component or physical state",
                )
            )

    commanding = {e.src for e in g.edges if e.kind is EdgeKind.CONTROL_ACTION}
    fed_back = {e.dst for e in g.edges if e.kind is EdgeKind.FEEDBACK}
    for controller in g.ids_of_kind(NodeKind.CONTROLLER):
        if controller in commanding and controller not in fed_back:
            findings.append(
                Finding(
                    WARNING,
                    "NO_FEEDBACK",
                    controller,
                    f"controller {controller!r} issues control actions but receives no feedback",
                )
            )

    for component in g.ids_of_kind(*TRACE_KINDS):
        result = trace_up(g, component)
        if not result.hazards and not result.losses:
            findings.append(
                Finding(
                    WARNING,
                    "UNREACHED_COMPONENT",
                    component,
                    f"{component!r} does not trace to any hazard or loss",
                )
            )

    findings.sort(key=lambda f: (f.severity != ERROR, f.code, f.subject))
    return ValidationReport(tuple(findings))


def require_ready(g: SGraph) -> None:
    """Raise ``NotAnalysisReady`` unless the model passes validation."""
    report = validate(g)
    if not report.analysis_ready:
        first = report.errors()[0]
        raise ModelError(
            "NotAnalysisReady",
            f"model is not analysis-ready: {first.code} on {first.subject or 'model'}",
            first.subject or None,
        )


def critical_subsystems(g: SGraph) -> CriticalSet:
    """Components and physical states whose compromise can reach a loss.

    The component set equals the union over losses of downward traces.  Each
    justification pair (h, l) records a hazard h reachable from the component
    with loss l reachable from h; a pair with an empty hazard slot covers the
    corner case of a loss reached without any intervening hazard.
    """
    require_ready(g)

    entries: list[tuple[str, tuple[str, ...], tuple[str, ...]]] = []
    for component in g.ids_of_kind(*TRACE_KINDS):
        hazards, losses = trace_up(g, component)
        if losses:
            entries.append((component, hazards, losses))

    justification: dict[str, tuple[tuple[str, str], ...]] = {}
    ordered = sorted(entries, key=lambda e: (-len(e[2]), e[0]))
    for component, hazards, losses in ordered:
        pairs: set[tuple[str, str]] = set()
        covered: set[str] = set()
        for hazard in hazards:
            downstream = _reach(g._succ, hazard)
            for loss in losses:
                if loss in downstream:
                    pairs.add((hazard, loss))
                    covered.add(loss)
        for loss in losses:
            if loss not in covered:
                pairs.add(("", loss))
        justification[component] = tuple(sorted(pairs))

    return CriticalSet(tuple(c for c, _, _ in ordered), justification)
