"""Exception hierarchy shared by every rieszlab module."""

from __future__ import annotations


class RieszLabError(Exception):
    """Base class for all library errors."""


class PoleError(RieszLabError, ValueError):
    """Argument sits on a pole of the Gamma function (or a quantity built from it)."""


class DomainTagError(RieszLabError, ValueError):
    """A field was tagged spatial where frequency was expected, or vice versa."""


class DecayError(RieszLabError, ValueError):
    """Input does not decay at the box edge, so box quadrature is unreliable."""


class RangeError(RieszLabError, ValueError):
    """A parameter lies outside the range an operation supports."""


class SpecError(RieszLabError, ValueError):
    """Invalid potential parameters (integer degrees, unsupported p or dimension)."""


class SingularPoint(RieszLabError, ValueError):
    """Evaluation requested at a point where a kernel is singular."""


class UnsupportedOrder(RieszLabError, ValueError):
    """Derivative order beyond the supported range."""


class GridIncompatible(RieszLabError, ValueError):
    """A dilation or shift does not map the grid onto itself."""


class EmptyWindow(RieszLabError, ValueError):
    """No grid nodes fall in the requested fitting window."""


class HypothesisError(RieszLabError, ValueError):
    """Parameters violate the hypotheses under which an identity holds."""


class ConfigError(RieszLabError, ValueError):
    """Malformed or inconsistent run configuration."""
