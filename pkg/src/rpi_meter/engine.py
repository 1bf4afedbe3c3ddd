"""Exact lattice verification of the output-uncertainty law.

The free field in a periodic box of size l decomposes into independent
transverse harmonic modes; truncating to a finite mode set and slicing time
into N_t intervals turns the weighted configuration integral into a
finite-dimensional complex Gaussian, evaluated in closed form (determinant
plus completed square), with no stochastic error.

Per mode of frequency w the integrated degrees of freedom are the N_t + 1
amplitude slices q_0..q_{N_t} (open time ends: the measurement does not pin
the field at the temporal boundary, so the w = 0 constant-in-time direction
is a genuine zero mode of the action, damped only by the measurement
weight).  The sliced exponent is

    i*S - W = i * sum_j [ rho*(q_{j+1}-q_j)^2/(2a) - rho*w^2*a*m_j(q)^2/2 ]
              - gamma * a * sum_j trap_j * (s*q_j - alpha)^2

with a = tau/N_t, midpoints m_j(q) = (q_j+q_{j+1})/2, trapezoid weights
trap_j, kinetic normalisation rho = Omega/tau (the box volume), readout
scale s = w (the field-strength amplitude; s = 1 for a zero-frequency test
mode) and gamma = 1/(tau*Delta^2) from the weight functional.  The readout
is the trapezoid time average of s*q.

With these quadrature choices the constant direction is exactly soluble, so
the closed-form output distribution obeys

    delta_out^2 = Delta^2 + 4/(Omega^2 * Delta^2)

for every mode with w != 0 at every N_t; the engine verifies this through
the generic dense machinery rather than assuming it.  For w = 0 the readout
distribution is exactly flat (any constant amplitude is classical), which
output_distribution reports as an explicit error.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .errors import ConstraintError, NumericalError
from .rpi_core import Region

MAX_MODES = 64
MAX_TIME_STEPS = 512
CONDITION_LIMIT = 1e12

#: excess variance below this fraction of the total is considered lost to
#: cancellation and excluded from the variance-law fit
_FIT_EXCESS_FLOOR = 1e-6


@dataclass(frozen=True)
class LatticeSpec:
    """Time-sliced, mode-truncated representation of the measured field."""

    time_steps: int
    duration: float
    mode_frequencies: tuple[float, ...]
    mode_volume_weights: tuple[float, ...]

    def __post_init__(self):
        if self.time_steps < 2:
            raise ConstraintError(f"time_steps must be >= 2, got {self.time_steps}")
        if self.time_steps > MAX_TIME_STEPS:
            raise ConstraintError(
                f"time_steps capped at {MAX_TIME_STEPS} (desk scale), got {self.time_steps}")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ConstraintError(f"duration must be positive, got {self.duration}")
        if len(self.mode_frequencies) != len(self.mode_volume_weights):
            raise ConstraintError("one volume weight per mode frequency required")
        if not self.mode_frequencies:
            raise ConstraintError("at least one mode required")
        for w in self.mode_frequencies:
            if not math.isfinite(w) or w < 0:
                raise ConstraintError(f"mode frequency must be finite and >= 0, got {w}")
        for v in self.mode_volume_weights:
            if not math.isfinite(v) or v <= 0:
                raise ConstraintError(f"volume weight must be positive, got {v}")

    def four_volume(self) -> float:
        return float(sum(self.mode_volume_weights))

    def mode_count(self) -> int:
        return len(self.mode_frequencies)


@dataclass(frozen=True)
class WeightSpec:
    """Gaussian measurement weight: width delta per readout component,
    centred on target, normalised by the region four-volume."""

    delta: tuple[float, ...]
    target: tuple[float, ...]
    four_volume: float

    def __post_init__(self):
        for d in self.delta:
            if not math.isfinite(d) or d <= 0:
                raise ConstraintError(f"weight width must be positive, got {d}")
        for t in self.target:
            if not math.isfinite(t):
                raise ConstraintError(f"weight target must be finite, got {t}")
        if not (math.isfinite(self.four_volume) and self.four_volume > 0):
            raise ConstraintError("weight four_volume must be positive")


def make_weight(lattice: LatticeSpec, delta, target=None) -> WeightSpec:
    """Broadcast scalar delta/target over the lattice's modes."""
    k = lattice.mode_count()
    deltas = tuple(float(d) for d in (delta if np.iterable(delta) else [delta] * k))
    if target is None:
        targets = (0.0,) * k
    else:
        targets = tuple(float(t) for t in (target if np.iterable(target) else [target] * k))
    if len(deltas) != k or len(targets) != k:
        raise ConstraintError("delta/target must be scalars or one value per mode")
    return WeightSpec(delta=deltas, target=targets, four_volume=lattice.four_volume())


class GaussianModel:
    """Discretised weighted configuration integral for independent modes.

    Holds the action quadratic form (i*S part) per mode plus the linear
    source term and readout map; a WeightSpec supplies the real damping part
    at evaluation time.  Immutable after construction.
    """

    def __init__(self, lattice: LatticeSpec, source_amplitudes=None):
        self.lattice = lattice
        k = lattice.mode_count()
        if source_amplitudes is None:
            source_amplitudes = (0.0,) * k
        src = tuple(float(j) for j in source_amplitudes)
        if len(src) != k:
            raise ConstraintError("one source amplitude per mode required")
        for j in src:
            if not math.isfinite(j):
                raise ConstraintError(f"source amplitude must be finite, got {j}")
        self.source_amplitudes = src
        # field-strength readout scale: the mode frequency; raw amplitude
        # for a zero-frequency test mode
        self.readout_scales = tuple(w if w > 0 else 1.0 for w in lattice.mode_frequencies)
        self.rho = lattice.four_volume() / lattice.duration

        n_t = lattice.time_steps
        self._a = lattice.duration / n_t
        self._n = n_t + 1
        trap = np.ones(self._n)
        trap[0] = trap[-1] = 0.5
        self._trap = trap
        # log of the flat-measure normalisation (2*pi)^(n/2) per mode
        self.log_normalization = 0.5 * self._n * math.log(2.0 * math.pi)

    # -- per-mode building blocks -----------------------------------------

    def action_matrix(self, mode: int) -> np.ndarray:
        """Real symmetric quadratic form of the sliced action for one mode."""
        n, a, rho = self._n, self._a, self.rho
        omega = self.lattice.mode_frequencies[mode]
        m = np.zeros((n, n))
        # kinetic: (rho/a) * path Laplacian
        idx = np.arange(n - 1)
        np.add.at(m, (idx, idx), rho / a)
        np.add.at(m, (idx + 1, idx + 1), rho / a)
        np.add.at(m, (idx, idx + 1), -rho / a)
        np.add.at(m, (idx + 1, idx), -rho / a)
        if omega > 0:
            # midpoint potential: -rho*w^2*a * B^T B, B the interval-midpoint map
            c = rho * omega ** 2 * a * 0.25
            np.add.at(m, (idx, idx), -c)
            np.add.at(m, (idx + 1, idx + 1), -c)
            np.add.at(m, (idx, idx + 1), -c)
            np.add.at(m, (idx + 1, idx), -c)
        return m

    def source_vector(self, mode: int) -> np.ndarray:
        """Constant-in-time drive discretised with the trapezoid rule."""
        return self.source_amplitudes[mode] * self._a * self._trap

    def readout_map(self, mode: int) -> np.ndarray:
        """Row vector mapping slice amplitudes to the time-averaged readout."""
        s = self.readout_scales[mode]
        return (self._a / self.lattice.duration) * s * self._trap

    def combined_form(self, mode: int, weight: WeightSpec) -> np.ndarray:
        """Complex symmetric Q with exponent -q^T Q q / 2 + J^T q + const."""
        gamma = self._gamma(mode, weight)
        s = self.readout_scales[mode]
        q = -1j * self.action_matrix(mode)
        q[np.diag_indices(self._n)] += 2.0 * gamma * self._a * s ** 2 * self._trap
        return q

    def classical_readout(self) -> tuple[float, ...]:
        """Readout of the discrete stationary path, mode by mode."""
        out = []
        for k in range(self.lattice.mode_count()):
            j0 = self.source_amplitudes[k]
            if j0 == 0.0:
                out.append(0.0)
                continue
            if self.lattice.mode_frequencies[k] == 0.0:
                raise ConstraintError(
                    f"mode {k}: a constant drive on a zero-frequency mode has "
                    "no stationary solution")
            a_s = self.action_matrix(k)
            try:
                q_cl = np.linalg.solve(a_s, -self.source_vector(k))
            except np.linalg.LinAlgError as exc:
                raise NumericalError(f"mode {k}: singular action matrix") from exc
            out.append(float(self.readout_map(k) @ q_cl))
        return tuple(out)

    def _gamma(self, mode: int, weight: WeightSpec) -> float:
        omega_4v = self.lattice.four_volume()
        if abs(weight.four_volume - omega_4v) > 1e-9 * omega_4v:
            raise ConstraintError(
                f"weight four-volume {weight.four_volume} does not match the "
                f"lattice region four-volume {omega_4v}")
        return self.rho / (weight.four_volume * weight.delta[mode] ** 2)


@dataclass(frozen=True)
class OutputDistribution:
    """Closed-form Gaussian readout distribution: exact by construction."""

    mean: tuple[float, ...]
    covariance: np.ndarray
    is_gaussian: bool = True

    def __post_init__(self):
        cov = np.asarray(self.covariance)
        if cov.shape != (len(self.mean), len(self.mean)):
            raise ConstraintError("covariance must be square over readout components")
        if not np.allclose(cov, cov.T):
            raise ConstraintError("covariance must be symmetric")
        if np.any(np.diag(cov) <= 0):
            raise ConstraintError("covariance must be positive definite")

    def third_central_moment(self) -> np.ndarray:
        """Identically zero: the distribution is Gaussian by construction."""
        return np.zeros(len(self.mean))


# ---------------------------------------------------------------------------
# mode enumeration for the periodic box
# ---------------------------------------------------------------------------

def enumerate_box_modes(l: float, mode_count: int):
    """First mode_count frequency shells of the transverse field in a
    periodic box: omega = 2*pi*sqrt(m)/l over integer lattice shells m = |n|^2,
    with degeneracy = (# lattice vectors) * 2 polarisations."""
    if mode_count < 1:
        raise ConstraintError(f"mode_count must be >= 1, got {mode_count}")
    if mode_count > MAX_MODES:
        raise ConstraintError(f"mode_count capped at {MAX_MODES}, got {mode_count}")
    shells: dict[int, int] = {}
    radius = 1
    while True:
        shells.clear()
        for nx in range(-radius, radius + 1):
            for ny in range(-radius, radius + 1):
                for nz in range(-radius, radius + 1):
                    m = nx * nx + ny * ny + nz * nz
                    if 0 < m <= radius * radius:
                        shells[m] = shells.get(m, 0) + 1
        complete = sorted(m for m in shells if m <= radius * radius)
        if len(complete) >= mode_count:
            chosen = complete[:mode_count]
            return [(2.0 * math.pi * math.sqrt(m) / l, 2 * shells[m]) for m in chosen]
        radius += 1


def build_mode_model(region: Region, mode_count: int, time_steps: int,
                     classical_source=None) -> tuple[LatticeSpec, GaussianModel]:
    """Transverse-mode model of the field in the measurement box.

    Volume weights are degeneracy shares of the region four-volume, so the
    truncated mode set carries the full weight of the readout norm.
    """
    shells = enumerate_box_modes(region.l, mode_count)
    omega_4v = region.four_volume()
    total_deg = sum(g for _, g in shells)
    lattice = LatticeSpec(
        time_steps=time_steps,
        duration=region.tau,
        mode_frequencies=tuple(w for w, _ in shells),
        mode_volume_weights=tuple(omega_4v * g / total_deg for _, g in shells),
    )
    return lattice, GaussianModel(lattice, classical_source)


def build_custom_model(lattice: LatticeSpec,
                       classical_source=None) -> GaussianModel:
    """Model over caller-specified mode frequencies (test instrumentation)."""
    return GaussianModel(lattice, classical_source)


# ---------------------------------------------------------------------------
# closed-form Gaussian evaluation
# ---------------------------------------------------------------------------

def _factor(model: GaussianModel, mode: int, weight: WeightSpec):
    """LU-factor the combined form with a conditioning guard."""
    q = model.combined_form(mode, weight)
    anorm = np.linalg.norm(q, 1)
    lu, piv, info = lapack.zgetrf(q)
    if info != 0:
        raise NumericalError(
            f"mode {mode} (omega={model.lattice.mode_frequencies[mode]}): "
            "combined quadratic form is singular; the weight leaves a flat "
            "direction undamped")
    rcond, _ = lapack.zgecon(lu, anorm, norm="1")
    if not np.isfinite(rcond) or rcond < 1.0 / CONDITION_LIMIT:
        raise NumericalError(
            f"mode {mode} (omega={model.lattice.mode_frequencies[mode]}): "
            f"combined form condition number exceeds {CONDITION_LIMIT:.0e}; "
            "the weight is too weak to damp this mode")
    return q, lu, piv


def _solve(lu, piv, rhs: np.ndarray) -> np.ndarray:
    x, info = lapack.zgetrs(lu, piv, rhs)
    if info != 0:
        raise NumericalError("linear solve failed on the combined form")
    return x


def _mode_log_amplitude(model: GaussianModel, mode: int, weight: WeightSpec,
                        alpha: float) -> complex:
    q, lu, piv = _factor(model, mode, weight)
    gamma = model._gamma(mode, weight)
    a, trap = model._a, model._trap
    s = model.readout_scales[mode]
    j_lin = 1j * model.source_vector(mode) + 2.0 * gamma * a * s * trap * alpha
    sign, logabs = np.linalg.slogdet(q)
    log_u = (model.log_normalization
             - 0.5 * (cmath.log(sign) + logabs)
             + 0.5 * (j_lin @ _solve(lu, piv, j_lin))
             - gamma * a * float(np.sum(trap)) * alpha ** 2)
    return log_u


def restricted_amplitude(model: GaussianModel, weight: WeightSpec,
                         readout=None) -> complex:
    """Amplitude of the weighted configuration integral at a given readout.

    Exact closed form; the global phase follows the principal determinant
    branch (physically irrelevant).
    """
    if readout is None:
        readout = weight.target
    alphas = tuple(float(r) for r in (readout if np.iterable(readout)
                                      else [readout] * model.lattice.mode_count()))
    if len(alphas) != model.lattice.mode_count():
        raise ConstraintError("one readout value per mode required")
    log_u = sum(_mode_log_amplitude(model, k, weight, alphas[k])
                for k in range(model.lattice.mode_count()))
    if abs(log_u.real) > 700.0:
        raise NumericalError(f"amplitude magnitude overflows: ln|U| = {log_u.real:.1f}")
    return cmath.exp(log_u)


def _mode_moments(model: GaussianModel, mode: int,
                  weight: WeightSpec) -> tuple[float, float]:
    """Mean and variance of the readout distribution for one mode."""
    _, lu, piv = _factor(model, mode, weight)
    gamma = model._gamma(mode, weight)
    a, trap = model._a, model._trap
    s = model.readout_scales[mode]
    u = 2.0 * gamma * a * s * trap
    qinv_u = _solve(lu, piv, u.astype(complex))
    weight_const = 2.0 * gamma * a * float(np.sum(trap))
    # ln P(alpha) = c2*alpha^2 + c1*alpha + const
    c2 = float(np.real(u @ qinv_u)) - weight_const
    if c2 >= -1e-12 * weight_const:
        raise NumericalError(
            f"mode {mode} (omega={model.lattice.mode_frequencies[mode]}): "
            "the weight does not constrain the time-averaged readout; the "
            "output distribution is flat in this direction")
    j_src = model.source_vector(mode)
    c1 = -2.0 * float(np.imag(u @ _solve(lu, piv, j_src.astype(complex))))
    return -c1 / (2.0 * c2), -1.0 / (2.0 * c2)


def output_distribution(model: GaussianModel,
                        weight: WeightSpec) -> OutputDistribution:
    """Exact Gaussian readout distribution (means and diagonal covariance)."""
    means, variances = [], []
    for k in range(model.lattice.mode_count()):
        mu, var = _mode_moments(model, k, weight)
        means.append(mu)
        variances.append(var)
    return OutputDistribution(mean=tuple(means), covariance=np.diag(variances))


def output_scale_squared(model: GaussianModel, weight: WeightSpec) -> float:
    """Law-facing squared output scale delta_out^2, volume-weight averaged.

    Per mode, delta_out^2 = 4 * readout variance (the distribution falls to
    1/e^2 of its peak one delta_out away); modes are combined with their
    volume-weight shares, matching the square-average readout norm.
    """
    omega_4v = model.lattice.four_volume()
    dist = output_distribution(model, weight)
    variances = np.diag(dist.covariance)
    shares = np.asarray(model.lattice.mode_volume_weights) / omega_4v
    return float(np.sum(shares * 4.0 * variances))


def variance_sweep(model: GaussianModel, deltas) -> list[tuple[float, float]]:
    """delta_out^2 as a function of the weight width Delta."""
    out = []
    for d in deltas:
        w = make_weight(model.lattice, float(d))
        out.append((float(d), output_scale_squared(model, w)))
    return out


@dataclass(frozen=True)
class VarianceFit:
    C: float
    quantum_exponent: float
    residual: float


def fit_variance_law(sweep, four_volume: float) -> VarianceFit:
    """Fit variance - Delta^2 = C / (Omega^2 * Delta^p) on a width sweep.

    Points whose excess over Delta^2 is lost to cancellation are excluded;
    the residual is the rms relative misfit over the points used.
    """
    pts = [(float(d), float(v)) for d, v in sweep]
    if len(pts) < 8:
        raise ConstraintError(f"need >= 8 sweep points, got {len(pts)}")
    ds = [d for d, _ in pts]
    if max(ds) <= 0 or min(ds) <= 0 or max(ds) / min(ds) < 1e4 - 1e-9:
        raise ConstraintError("sweep must span at least 4 decades of Delta "
                              "(degenerate sweep)")
    log_d, log_e = [], []
    for d, v in pts:
        excess = v - d * d
        if excess > _FIT_EXCESS_FLOOR * v:
            log_d.append(math.log(d))
            log_e.append(math.log(excess))
    if len(log_d) < 3:
        raise ConstraintError("too few sweep points with a resolvable quantum "
                              "excess; extend the sweep toward small Delta")
    a = np.column_stack([np.ones(len(log_d)), -np.asarray(log_d)])
    coef, *_ = np.linalg.lstsq(a, np.asarray(log_e), rcond=None)
    intercept, p = float(coef[0]), float(coef[1])
    c = math.exp(intercept) * four_volume ** 2
    fit = a @ coef
    residual = float(np.sqrt(np.mean(np.expm1(fit - np.asarray(log_e)) ** 2)))
    return VarianceFit(C=c, quantum_exponent=p, residual=residual)
