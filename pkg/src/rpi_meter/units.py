"""Physical constants and unit systems.

Everything downstream computes in natural units (hbar = c = 1, centimetre
base length when converting from CGS).  This module owns the constants and
the boundary conversions, so that no other module has to care where factors
of hbar and c sit.

Charges follow the Gaussian (CGS-esu) convention throughout: the Coulomb
field of a charge Q at distance l is Q/l^2 with no 4*pi*eps0, and
e^2 = alpha * hbar * c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConstraintError

# CODATA-2018 values, Gaussian-CGS
CGS_HBAR = 1.054571817e-27  # erg s
CGS_C = 2.99792458e10       # cm / s

ALPHA_PAPER = 1.0 / 137.0
ALPHA_CODATA = 1.0 / 137.035999


class UnitKind(str, Enum):
    NATURAL = "natural"
    GAUSSIAN_CGS = "cgs"


class AlphaMode(str, Enum):
    PAPER_EXACT = "paper"
    CODATA = "codata"


@dataclass(frozen=True)
class UnitSystem:
    """A consistent set of constants plus boundary conversions.

    In the natural kind, hbar = c = 1 exactly and every conversion is the
    identity.  In the Gaussian-CGS kind, lengths are centimetres, times are
    seconds, fields are statvolt/cm, and natural-unit values use the
    centimetre as base length (so times become light-centimetres and fields
    carry 1/sqrt(hbar*c)).
    """

    kind: UnitKind
    alpha_mode: AlphaMode
    hbar: float
    c: float
    alpha: float
    e: float

    # -- boundary conversions ------------------------------------------------

    def length_to_natural(self, x: float) -> float:
        return x

    def length_from_natural(self, x: float) -> float:
        return x

    def time_to_natural(self, t: float) -> float:
        return self.c * t if self.kind is UnitKind.GAUSSIAN_CGS else t

    def time_from_natural(self, t: float) -> float:
        return t / self.c if self.kind is UnitKind.GAUSSIAN_CGS else t

    def field_to_natural(self, value: float) -> float:
        if self.kind is UnitKind.GAUSSIAN_CGS:
            return value / math.sqrt(self.hbar * self.c)
        return value

    def field_from_natural(self, value: float) -> float:
        if self.kind is UnitKind.GAUSSIAN_CGS:
            return value * math.sqrt(self.hbar * self.c)
        return value


def constants(kind: UnitKind | str = UnitKind.NATURAL,
              alpha_mode: AlphaMode | str = AlphaMode.PAPER_EXACT) -> UnitSystem:
    """Build a consistent UnitSystem for the requested kind and alpha mode."""
    kind = UnitKind(kind)
    alpha_mode = AlphaMode(alpha_mode)
    alpha = ALPHA_PAPER if alpha_mode is AlphaMode.PAPER_EXACT else ALPHA_CODATA
    if kind is UnitKind.NATURAL:
        hbar, c = 1.0, 1.0
    else:
        hbar, c = CGS_HBAR, CGS_C
    e = math.sqrt(alpha * hbar * c)
    return UnitSystem(kind=kind, alpha_mode=alpha_mode,
                      hbar=hbar, c=c, alpha=alpha, e=e)


NATURAL = constants(UnitKind.NATURAL, AlphaMode.PAPER_EXACT)


def require_positive(**values: float) -> None:
    """Raise ConstraintError unless every named value is finite and > 0."""
    for name, v in values.items():
        if not math.isfinite(v) or v <= 0.0:
            raise ConstraintError(f"{name} must be positive and finite, got {v!r}")
