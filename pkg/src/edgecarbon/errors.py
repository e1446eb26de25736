"""Exception hierarchy shared by every edgecarbon module."""

from __future__ import annotations


class EdgeCarbonError(Exception):
    """Base class for all errors raised by the library."""


class ValidationError(EdgeCarbonError, ValueError):
    """An input value or document violates a documented invariant."""


class ConfigurationError(ValidationError):
    """Inputs are individually valid but do not fit together (e.g. a missing coefficient)."""


class ModelError(ValidationError):
    """A power model cannot be evaluated (e.g. it has no measured points)."""


class CoverageError(EdgeCarbonError):
    """A time series does not span the interval it is asked about."""
