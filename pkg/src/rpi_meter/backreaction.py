"""Total error budget of an undisturbing field measurement, and its optimum.

The probe's quantum mechanics contributes hbar*c/(dx * c*tau * Q) while its
own Coulomb field contaminates the measured region by Q/l^2.  Minimising the
sum over the probe charge, then pushing dx to its geometric bound, yields a
piecewise absolute limit on the measurement uncertainty as a function of the
box shape rho = l/(c*tau):

    rho >= 1      acausal:          delta = 2*sqrt(hbar*c)/(c*tau)^2,
                  the box splits into independent causal cells of size c*tau;
    alpha <= rho  generic:          delta = 2*sqrt(hbar*c/(c*tau*l^3));
    rho < alpha   charge-quantized: delta = 2*e/l^2,
                  because the optimal charge would otherwise drop below e.

The limit is continuous across both boundaries.  Formulas carry explicit
hbar and c, so inputs may be in any unit system (natural values with the
default system).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConstraintError
from .rpi_core import Region
from .units import NATURAL, UnitSystem, require_positive

#: Tolerance for "caller's dx exceeds the allowed default" (pure roundoff slack).
_DX_RTOL = 1e-12


class LimitRegime(str, Enum):
    GENERIC = "generic"
    CHARGE_QUANTIZED = "charge_quantized"
    ACAUSAL = "acausal"


@dataclass(frozen=True)
class MeasurementPlan:
    """A concrete measurement setup to evaluate.

    region holds (l, tau) in the plan's unit system.  delta_x defaults to the
    regime rule (dx = cell size, reduced when charge quantization binds) and
    may only be overridden downward.  With enforce_charge_quantization the
    probe charge is clamped to at least e.
    """

    region: Region
    delta_x: float | None = None
    enforce_charge_quantization: bool = True
    system: UnitSystem = NATURAL


@dataclass(frozen=True)
class LimitBreakdown:
    """Absolute-limit evaluation: the limit value and how it was attained."""

    regime: LimitRegime
    delta_E_abs: float
    Q_opt: float
    delta_x_used: float
    E_meas: float
    lam: float
    subregion_count: int


@dataclass(frozen=True)
class QuantizedChargeRule:
    delta_x_used: float
    Q_opt: float
    quantized: bool


def proper_field(Q: float, l: float, system: UnitSystem = NATURAL) -> float:
    """Coulomb field of the probe body in a typical point of the region."""
    require_positive(Q=Q, l=l)
    return Q / l ** 2


def total_uncertainty(delta_x: float, tau: float, Q: float, l: float,
                      system: UnitSystem = NATURAL) -> float:
    """Mechanical error plus the probe's proper field."""
    require_positive(delta_x=delta_x, tau=tau, Q=Q, l=l)
    if delta_x > l * (1.0 + _DX_RTOL):
        raise ConstraintError(
            f"position error delta_x={delta_x} cannot exceed the region size l={l}")
    hc = system.hbar * system.c
    return hc / (delta_x * system.c * tau * Q) + Q / l ** 2


def optimal_charge(l: float, tau: float, delta_x: float,
                   system: UnitSystem = NATURAL) -> float:
    """Probe charge balancing mechanical error against the proper field."""
    require_positive(l=l, tau=tau, delta_x=delta_x)
    if delta_x > l * (1.0 + _DX_RTOL):
        raise ConstraintError(
            f"position error delta_x={delta_x} cannot exceed the region size l={l}")
    hc = system.hbar * system.c
    return math.sqrt(hc * l ** 2 / (delta_x * system.c * tau))


def optimal_uncertainty(l: float, tau: float, delta_x: float,
                        system: UnitSystem = NATURAL) -> float:
    """Uncertainty at the optimal charge: both budget terms equal."""
    require_positive(l=l, tau=tau, delta_x=delta_x)
    if delta_x > l * (1.0 + _DX_RTOL):
        raise ConstraintError(
            f"position error delta_x={delta_x} cannot exceed the region size l={l}")
    hc = system.hbar * system.c
    return 2.0 * math.sqrt(hc / (delta_x * system.c * tau * l ** 2))


def quantized_charge_rule(l: float, tau: float,
                          system: UnitSystem = NATURAL) -> QuantizedChargeRule:
    """Position-error rule keeping the optimal charge feasible (>= e).

    dx = l / max(1, alpha * c*tau / l): when the optimal charge at dx = l
    would fall below the elementary charge, dx shrinks until the optimum is
    exactly e.  Applies to causal boxes; acausal boxes use the causal-cell
    rule inside absolute_limit.
    """
    require_positive(l=l, tau=tau)
    ctau = system.c * tau
    dx = l / max(1.0, system.alpha * ctau / l)
    return QuantizedChargeRule(
        delta_x_used=dx,
        Q_opt=optimal_charge(l, tau, dx, system),
        quantized=l / ctau < system.alpha,
    )


def elementary_uncertainty(lam: float, tau: float,
                           system: UnitSystem = NATURAL) -> float:
    """Output-spread floor of one causal cell of size lam measured for tau."""
    require_positive(lam=lam, tau=tau)
    hc = system.hbar * system.c
    return 2.0 * math.sqrt(hc / (system.c * tau * lam ** 3))


def evaluate_plan(plan: MeasurementPlan) -> LimitBreakdown:
    """Evaluate a measurement plan: per-cell charge optimum, quantization
    clamp, and causal decomposition."""
    system = plan.system
    l, tau = plan.region.l, plan.region.tau
    ctau = system.c * tau
    lam = min(l, ctau)
    rho = l / ctau

    # default position error: the cell size, reduced when quantization binds
    dx_default = lam
    if plan.enforce_charge_quantization:
        dx_default = lam / max(1.0, system.alpha * ctau / lam)
    if plan.delta_x is None:
        dx = dx_default
    else:
        require_positive(delta_x=plan.delta_x)
        if plan.delta_x > dx_default * (1.0 + _DX_RTOL):
            raise ConstraintError(
                f"delta_x={plan.delta_x} exceeds the allowed value "
                f"{dx_default} for this region; overrides must go downward")
        dx = plan.delta_x

    hc = system.hbar * system.c
    q = math.sqrt(hc * lam ** 2 / (dx * system.c * tau))
    quantization_applied = False
    if plan.enforce_charge_quantization and q < system.e:
        q = system.e
        quantization_applied = True

    delta = hc / (dx * system.c * tau * q) + q / lam ** 2

    if rho >= 1.0:
        regime = LimitRegime.ACAUSAL
    elif plan.enforce_charge_quantization and rho < system.alpha:
        regime = LimitRegime.CHARGE_QUANTIZED
    else:
        regime = LimitRegime.GENERIC

    return LimitBreakdown(
        regime=regime,
        delta_E_abs=delta,
        Q_opt=q,
        delta_x_used=dx,
        E_meas=q / lam ** 2,
        lam=lam,
        subregion_count=math.ceil(l / lam) ** 3,
    )


def absolute_limit(l: float, tau: float,
                   system: UnitSystem = NATURAL) -> LimitBreakdown:
    """Absolute measurability limit of the electric field for a (l, tau) box."""
    require_positive(l=l, tau=tau)
    return evaluate_plan(MeasurementPlan(region=Region(l=l, tau=tau), system=system))
