# this_file: src/reactpinn/errors.py
"""
Exception hierarchy for reactpinn.

Every concrete error also subclasses the closest builtin, so callers can catch
either ``ValueError``/``ArithmeticError`` or the reactpinn-specific class.
"""

from typing import Optional


class PinnError(Exception):
    """Base class for all reactpinn errors."""


class ConfigurationError(PinnError, ValueError):
    """Invalid shapes, names, settings or stability bounds."""


class NumericError(PinnError, ArithmeticError):
    """
    A value became non-finite.

    Attributes:
        layer: Hidden-layer index where the overflow happened, if known
        index: Collocation/sample index of the offending point, if known
        parameter: Identifier of the offending parameter, if known
    """

    def __init__(
        self,
        message: str,
        layer: Optional[int] = None,
        index: Optional[int] = None,
        parameter: Optional[str] = None,
    ) -> None:
        super().__init__(message)
        self.layer = layer
        self.index = index
        self.parameter = parameter


class DegenerateInputError(PinnError, ValueError):
    """Metric denominators vanish (zero-norm or constant truth)."""


class DomainRangeError(PinnError, ValueError):
    """A query point lies outside the grid it is interpolated on."""
