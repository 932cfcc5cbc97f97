"""Numerical verification engine for Desargues configuration spaces."""

from .projective import (
    DEFAULT_TOL,
    HPoint,
    PLine,
    Tolerances,
    bracket,
    line_through,
    meet_lines,
    on_line,
    proj_dist,
    span_dim,
)
from .strata import Config6, MembershipReport, SpaceTag, validate

__version__ = "0.1.0"

__all__ = [
    "Config6",
    "DEFAULT_TOL",
    "HPoint",
    "MembershipReport",
    "PLine",
    "SpaceTag",
    "Tolerances",
    "bracket",
    "line_through",
    "meet_lines",
    "on_line",
    "proj_dist",
    "span_dim",
    "validate",
    "__version__",
]
