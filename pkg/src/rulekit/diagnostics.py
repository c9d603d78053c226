"""Shared diagnostic types used by the rule parser, linter, and Java frontend."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Span:
    """Half-open character range [start, end) in some input text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"span start {self.start} > end {self.end}")


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    message: str
    span: Span
    hint: str | None = None

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def to_dict(self) -> dict:
        d = {
            "severity": self.severity.value,
            "message": self.message,
            "span": {"start": self.span.start, "end": self.span.end},
        }
        if self.hint is not None:
            d["hint"] = self.hint
        return d


def error(message: str, start: int, end: int, hint: str | None = None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, message, Span(start, end), hint)


def warning(message: str, start: int, end: int, hint: str | None = None) -> Diagnostic:
    return Diagnostic(Severity.WARNING, message, Span(start, end), hint)
