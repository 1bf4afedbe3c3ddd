"""Output-uncertainty law for a field measurement restricted to a spacetime box.

A measurement of a field component over a region of spatial size l and
duration tau, performed by a device of resolution Delta, produces an output
whose spread delta exceeds the device resolution:

    delta^2 = Delta^2 + 4 / (Omega^2 * Delta^2),       Omega = tau * l^3

in natural units.  The law has a classical branch (delta ~ Delta for coarse
resolution), a quantum branch (delta ~ 2/(Omega*Delta) for fine resolution)
and an absolute minimum delta_min = 2/sqrt(Omega) at Delta_opt = sqrt(2/Omega).
Electric and magnetic channels obey the same law independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConstraintError
from .units import NATURAL, UnitSystem, require_positive

#: Default ratio Delta/Delta_opt beyond which a measurement counts as firmly
#: classical (and below whose inverse as firmly quantum).
REGIME_THRESHOLD = 10.0


@dataclass(frozen=True)
class Region:
    """Spacetime measurement box: spatial size l, duration tau (natural units)."""

    l: float
    tau: float

    def __post_init__(self):
        require_positive(l=self.l, tau=self.tau)

    def four_volume(self) -> float:
        return self.tau * self.l ** 3

    def causal_ratio(self) -> float:
        """l / (c*tau); > 1 means light cannot cross the box within tau."""
        return self.l / self.tau


@dataclass(frozen=True)
class Resolution:
    """Device resolution per field channel."""

    delta_E_in: float
    delta_H_in: float

    def __post_init__(self):
        require_positive(delta_E_in=self.delta_E_in, delta_H_in=self.delta_H_in)


class RegimeKind(str, Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"
    BORDERLINE = "borderline"


@dataclass(frozen=True)
class UncertaintyReport:
    delta_E_out: float
    delta_H_out: float
    regime: RegimeKind
    delta_opt: float
    delta_min: float


def _delta_out(delta_in: float, omega: float) -> float:
    if delta_in <= 0.0 or not math.isfinite(delta_in):
        raise ConstraintError(
            f"device resolution must be positive and finite, got {delta_in!r}")
    return math.sqrt(delta_in ** 2 + 4.0 / (omega ** 2 * delta_in ** 2))


def _classify_scalar(delta_in: float, omega: float, threshold: float) -> RegimeKind:
    ratio = delta_in / math.sqrt(2.0 / omega)
    if ratio >= threshold:
        return RegimeKind.CLASSICAL
    if ratio <= 1.0 / threshold:
        return RegimeKind.QUANTUM
    return RegimeKind.BORDERLINE


def output_uncertainty(region: Region, res: Resolution,
                       threshold: float = REGIME_THRESHOLD) -> UncertaintyReport:
    """Exact output spread per channel, with regime tag and the region optimum."""
    omega = region.four_volume()
    return UncertaintyReport(
        delta_E_out=_delta_out(res.delta_E_in, omega),
        delta_H_out=_delta_out(res.delta_H_in, omega),
        regime=classify_regime(region, res, threshold),
        delta_opt=math.sqrt(2.0 / omega),
        delta_min=2.0 / math.sqrt(omega),
    )


def classify_regime(region: Region, res: Resolution,
                    threshold: float = REGIME_THRESHOLD) -> RegimeKind:
    """Classical / quantum / borderline, judged against Delta_opt = sqrt(2/Omega).

    Both channels are classified independently; if they disagree the overall
    tag is borderline.
    """
    omega = region.four_volume()
    tag_e = _classify_scalar(res.delta_E_in, omega, threshold)
    tag_h = _classify_scalar(res.delta_H_in, omega, threshold)
    return tag_e if tag_e is tag_h else RegimeKind.BORDERLINE


def optimal_resolution(region: Region) -> Resolution:
    """The resolution minimising the output spread: Delta_opt = sqrt(2/Omega)."""
    d = math.sqrt(2.0 / region.four_volume())
    return Resolution(delta_E_in=d, delta_H_in=d)


def minimal_uncertainty(region: Region, system: UnitSystem = NATURAL) -> float:
    """Absolute floor of the output spread, 2*sqrt(hbar/(tau*l^3)).

    The region is given in natural units; the result is converted to the
    requested unit system's field unit.
    """
    value = 2.0 / math.sqrt(region.four_volume())
    return system.field_from_natural(value)
