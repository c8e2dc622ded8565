"""Exception hierarchy shared by every module."""

from __future__ import annotations


class TorusMirrorError(Exception):
    """Base class for all library errors."""


class DomainError(TorusMirrorError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class TruncationError(TorusMirrorError):
    """A series cutoff is too small for the requested tolerance."""


class StabilityError(TorusMirrorError, ValueError):
    """Rank and degree are not coprime."""


class NonTransversalError(TorusMirrorError, ValueError):
    """Two branes share a slope where a transverse pair is required."""


class QuadratureError(TorusMirrorError):
    """A numerical integral failed to reach its tolerance."""


class ConfigError(TorusMirrorError, ValueError):
    """A run configuration failed validation.

    ``problems`` maps field names to diagnostics.
    """

    def __init__(self, problems: dict[str, str]):
        self.problems = dict(problems)
        lines = [f"{k}: {v}" for k, v in sorted(self.problems.items())]
        super().__init__("invalid configuration\n  " + "\n  ".join(lines))
