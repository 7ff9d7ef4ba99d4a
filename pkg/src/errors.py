"""
Error Types

All toolkit errors derive from ValueError so callers that already guard
numeric input with ``except ValueError`` keep working.
"""

from __future__ import annotations


class PseudoentropyError(ValueError):
    """Base class for every error raised by the toolkit."""


class ValidationError(PseudoentropyError):
    """Input violates a documented invariant (probabilities, moment ordering, ...)."""


class DimensionError(PseudoentropyError):
    """Two objects live on domains of different bit-width."""


class UsageError(PseudoentropyError):
    """Operation called with arguments outside its supported range."""


class RangeError(PseudoentropyError):
    """Requested target cannot be reached within the domain (e.g. T > 2^n)."""


class PreconditionError(PseudoentropyError):
    """A precondition of the attack does not hold for the given inputs."""


class ConfigError(PseudoentropyError):
    """Experiment configuration failed validation.

    ``errors`` holds one message per violated field.
    """

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
