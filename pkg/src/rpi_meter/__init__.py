"""Quantum limits on electromagnetic-field measurability.

Core calculators (natural units internally, conversions at the boundary):

- units: constants, unit systems, boundary conversions
- rpi_core: output-uncertainty law for a spacetime measurement box
- probe: mechanical-meter error budget of a charged probe
- backreaction: undisturbing-measurement budget and the piecewise absolute limit
- engine: exact lattice verification of the uncertainty law
- sampler: Monte Carlo draws from the output distribution

The service subpackage wraps everything in a FastAPI app; the CLI
(`rpi-meter`) is a thin client over the same handlers.
"""

__version__ = "0.1.0"

from .backreaction import (LimitBreakdown, LimitRegime, MeasurementPlan,
                           absolute_limit, elementary_uncertainty,
                           evaluate_plan, optimal_charge, optimal_uncertainty,
                           proper_field, quantized_charge_rule,
                           total_uncertainty)
from .engine import (GaussianModel, LatticeSpec, OutputDistribution, WeightSpec,
                     build_custom_model, build_mode_model, enumerate_box_modes,
                     fit_variance_law, make_weight, output_distribution,
                     restricted_amplitude, variance_sweep)
from .errors import (ConstraintError, DegenerateFrequencyError, NumericalError,
                     RpiMeterError, UsageError)
from .probe import (ProbeBody, ProbeErrorBudget, error_budget,
                    mechanical_field_error, optimal_force_error,
                    optimal_position_error)
from .rpi_core import (Region, RegimeKind, Resolution, UncertaintyReport,
                       classify_regime, minimal_uncertainty, optimal_resolution,
                       output_uncertainty)
from .sampler import (FieldConfiguration, SampleStats, empirical_stats,
                      sample_outputs)
from .units import (AlphaMode, UnitKind, UnitSystem, constants)

__all__ = [
    "__version__",
    "AlphaMode", "UnitKind", "UnitSystem", "constants",
    "Region", "RegimeKind", "Resolution", "UncertaintyReport",
    "classify_regime", "minimal_uncertainty", "optimal_resolution",
    "output_uncertainty",
    "ProbeBody", "ProbeErrorBudget", "error_budget", "mechanical_field_error",
    "optimal_force_error", "optimal_position_error",
    "LimitBreakdown", "LimitRegime", "MeasurementPlan", "absolute_limit",
    "elementary_uncertainty", "evaluate_plan", "optimal_charge",
    "optimal_uncertainty", "proper_field", "quantized_charge_rule",
    "total_uncertainty",
    "GaussianModel", "LatticeSpec", "OutputDistribution", "WeightSpec",
    "build_custom_model", "build_mode_model", "enumerate_box_modes",
    "fit_variance_law", "make_weight", "output_distribution",
    "restricted_amplitude", "variance_sweep",
    "FieldConfiguration", "SampleStats", "empirical_stats", "sample_outputs",
    "RpiMeterError", "ConstraintError", "DegenerateFrequencyError",
    "NumericalError", "UsageError",
]
