"""Error budget of a charged mechanical meter observing a field over time tau.

The meter is an oscillator of mass m, charge Q and eigenfrequency omega; the
measured motion has characteristic frequency Omega_m.  At the quantum-optimal
working point the position error, force error and inferred field error obey

    dx      = sqrt(hbar / (m * tau * |Omega_m^2 - omega^2|))
    dF      = sqrt(m * hbar * |Omega_m^2 - omega^2| / tau)
    dE_mech = hbar * c / (dx * c*tau * Q)

so that dx*dF = hbar/tau and Q*dE_mech*tau*dx = hbar exactly (the
uncertainty-relation reading of the optimum).  Formulas are written with
explicit hbar and c, so they accept inputs in whichever unit system is
passed; equalities mean the limiting optimal regime, not typical errors.

A free charge is the special case omega = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateFrequencyError
from .units import NATURAL, UnitSystem, require_positive

#: |Omega_m^2 - omega^2| below this fraction of max(Omega_m^2, omega^2) is
#: treated as resonance, where the optimal-error formulas are meaningless.
FREQ_DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True)
class ProbeBody:
    """Charged mechanical meter: charge Q, mass m, eigenfrequency omega,
    measured-motion frequency, and position error delta_x."""

    Q: float
    m: float
    omega: float
    motion_frequency: float
    delta_x: float

    def __post_init__(self):
        require_positive(Q=self.Q, m=self.m, delta_x=self.delta_x)
        if self.omega < 0 or self.motion_frequency < 0:
            raise DegenerateFrequencyError("frequencies must be non-negative")


@dataclass(frozen=True)
class ProbeErrorBudget:
    delta_x: float
    delta_F: float
    delta_E_mech: float


def _freq_split(motion_frequency: float, omega: float) -> float:
    split = abs(motion_frequency ** 2 - omega ** 2)
    guard = FREQ_DEGENERACY_RTOL * max(motion_frequency ** 2, omega ** 2)
    if split <= guard:
        raise DegenerateFrequencyError(
            f"motion frequency {motion_frequency} and probe eigenfrequency "
            f"{omega} are degenerate; the optimal-error formulas are singular "
            "at resonance")
    return split


def optimal_position_error(m: float, tau: float, motion_frequency: float,
                           omega: float, system: UnitSystem = NATURAL) -> float:
    """Quantum-optimal position error of the meter."""
    require_positive(m=m, tau=tau)
    split = _freq_split(motion_frequency, omega)
    return math.sqrt(system.hbar / (m * tau * split))


def optimal_force_error(m: float, tau: float, motion_frequency: float,
                        omega: float, system: UnitSystem = NATURAL) -> float:
    """Precision of the force estimate at the optimal position error."""
    require_positive(m=m, tau=tau)
    split = _freq_split(motion_frequency, omega)
    return math.sqrt(m * system.hbar * split / tau)


def mechanical_field_error(delta_x: float, tau: float, Q: float,
                           system: UnitSystem = NATURAL) -> float:
    """Field error from the meter's quantum mechanics alone (F = Q*E)."""
    require_positive(delta_x=delta_x, tau=tau, Q=Q)
    return system.hbar * system.c / (delta_x * system.c * tau * Q)


def error_budget(m: float, tau: float, motion_frequency: float, omega: float,
                 Q: float, system: UnitSystem = NATURAL) -> ProbeErrorBudget:
    """Full optimal budget (dx, dF, dE_mech) for one meter configuration."""
    require_positive(Q=Q)
    dx = optimal_position_error(m, tau, motion_frequency, omega, system)
    return ProbeErrorBudget(
        delta_x=dx,
        delta_F=optimal_force_error(m, tau, motion_frequency, omega, system),
        delta_E_mech=mechanical_field_error(dx, tau, Q, system),
    )
