"""Exception hierarchy shared by every parcorr module."""

from __future__ import annotations


class ParcorrError(Exception):
    """Base class for all errors raised by parcorr."""


class ConfigError(ParcorrError, ValueError):
    """Invalid configuration or an option incompatible with the data."""


class StructuralError(ParcorrError, ValueError):
    """Array shapes do not line up (e.g. mismatched row counts)."""


class ValidationError(ParcorrError, ValueError):
    """A dataset failed validation; ``violations`` lists every failed rule."""

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class DegenerateSeries(ParcorrError, ArithmeticError):
    """A series has (numerically) zero variance, so the association is undefined."""


class IllConditioned(ParcorrError, ArithmeticError):
    """Too few timepoints to fit an unpenalized regression."""


class ParseError(ParcorrError, ValueError):
    """A CSV or manifest file could not be parsed."""


# Exit codes for the CLI: usage/config problems vs. problems with the data.
CONFIG_ERRORS = (ConfigError,)
DATA_ERRORS = (StructuralError, ValidationError, DegenerateSeries, IllConditioned, ParseError)
