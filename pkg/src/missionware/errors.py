"""Structured exception types shared across the package.

Every error carries a stable machine-readable ``code`` token (for example
``"DuplicateId"`` or ``"BadScenario"``) plus, where one exists, the id of the
offending element.  The two subclasses split errors by who is at fault, which
is also how the command line maps them to exit codes: bad caller input
(malformed documents, unknown ids, invalid parameters) versus a model that
violates a structural or readiness requirement.
"""

from __future__ import annotations


class ToolError(Exception):
    """Base class for all structured errors raised by this package."""

    def __init__(self, code: str, message: str, subject: str | None = None):
        super().__init__(message)
        self.code = code
        self.subject = subject

    def __str__(self) -> str:
        return f"{self.code}: {super().__str__()}"


class InputError(ToolError):
    """The caller supplied bad input: documents, ids, flags, or parameters."""


class ModelError(ToolError):
    """The model itself breaks a structural or analysis-readiness rule."""
