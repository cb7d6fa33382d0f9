"""Finite-quotient computations for obstructed mod-l Galois deformation problems.

The package works on the tame quotient ``Gamma(l, q) = <F, tau | F tau F^-1 = tau^q>``
of a local Galois group, cut down to a finite group, and builds the pieces
needed to reason about obstructions: exact linear algebra mod l, Galois
modules, bar cohomology, lifts to ``Z/l^2``, an explicit Brauer-class cocycle,
local invariant criteria, newform congruence scans and truncated deformation
rings.  Global objects enter only as caller-supplied verdicts.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DimensionMismatch,
    GaldefError,
    InsufficientCoefficients,
    InvalidParameters,
    NotACocycle,
    NotAUnit,
    NotComparable,
    SchemaError,
)
from .tame import TameElement, TameGroup, make_group  # noqa: E402

__all__ = [
    "__version__",
    "GaldefError",
    "InvalidParameters",
    "NotAUnit",
    "DimensionMismatch",
    "NotACocycle",
    "SchemaError",
    "InsufficientCoefficients",
    "NotComparable",
    "TameGroup",
    "TameElement",
    "make_group",
]
