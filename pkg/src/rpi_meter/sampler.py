"""Monte Carlo draws from the measurement-output distribution.

Outputs scatter around the classical configuration with a Gaussian spread
set by the output-uncertainty law; the sampler never re-derives that spread,
it always takes delta from rpi_core.output_uncertainty, so the analytic law
and the sampled law cannot drift apart.

The field is coarse-grained into K spacetime cells.  Each cell component is
drawn independently with standard deviation sqrt(K)*delta/2, so the
square-average readout norm (1/K)*sum matches the K-cell discretisation of
the output distribution; per-cell values diverge as K grows (white-noise
character of the functional Gaussian) and the square-average norm is the
physical quantity.

Sampling is deterministic for a fixed seed: the stream is split into
fixed-size chunks with per-chunk child seeds, so results do not depend on
how many worker threads consume the chunks (RPI_METER_THREADS caps the
worker count).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, UsageError
from .rpi_core import Region, Resolution, output_uncertainty

_CHUNK = 8192
_DEFAULT_WORKERS = 4


@dataclass(frozen=True, eq=False)
class FieldConfiguration:
    """Coarse field configuration: 3 electric and 3 magnetic components per cell."""

    E: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        e = np.atleast_2d(np.asarray(self.E, dtype=float))
        h = np.atleast_2d(np.asarray(self.H, dtype=float))
        if e.shape != h.shape or e.ndim != 2 or e.shape[1] != 3 or e.shape[0] < 1:
            raise ConstraintError(
                f"E and H must both have shape (K, 3) with K >= 1, got "
                f"{e.shape} and {h.shape}")
        if not (np.all(np.isfinite(e)) and np.all(np.isfinite(h))):
            raise ConstraintError("field values must be finite")
        object.__setattr__(self, "E", e)
        object.__setattr__(self, "H", h)

    @property
    def cells(self) -> int:
        return self.E.shape[0]

    @classmethod
    def zeros(cls, cells: int = 1) -> "FieldConfiguration":
        return cls(E=np.zeros((cells, 3)), H=np.zeros((cells, 3)))


@dataclass(frozen=True, eq=False)
class SampleStats:
    n: int
    empirical_mean: FieldConfiguration
    norm_deviation_E: float
    norm_deviation_H: float
    per_component_sd: float


def _worker_cap(requested: int | None) -> int:
    env = os.environ.get("RPI_METER_THREADS")
    cap = None
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise UsageError(f"RPI_METER_THREADS must be an integer, got {env!r}")
        if cap < 1:
            raise UsageError(f"RPI_METER_THREADS must be >= 1, got {cap}")
    workers = requested if requested is not None else _DEFAULT_WORKERS
    if cap is not None:
        workers = min(workers, cap)
    return max(1, workers)


def _draw_arrays(classical: FieldConfiguration, region: Region, res: Resolution,
                 n: int, seed: int, workers: int | None = None):
    """Raw (n, K, 3) sample arrays for both fields; chunk-deterministic."""
    if n < 1:
        raise ConstraintError(f"sample count must be >= 1, got {n}")
    k = classical.cells
    report = output_uncertainty(region, res)
    sd_e = math.sqrt(k) * report.delta_E_out / 2.0
    sd_h = math.sqrt(k) * report.delta_H_out / 2.0

    n_chunks = (n + _CHUNK - 1) // _CHUNK
    children = np.random.SeedSequence(seed).spawn(n_chunks)

    def one_chunk(i: int):
        count = min(_CHUNK, n - i * _CHUNK)
        rng = np.random.Generator(np.random.PCG64(children[i]))
        e = classical.E + sd_e * rng.standard_normal((count, k, 3))
        h = classical.H + sd_h * rng.standard_normal((count, k, 3))
        return e, h

    n_workers = min(_worker_cap(workers), n_chunks)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(one_chunk, range(n_chunks)))
    else:
        parts = [one_chunk(i) for i in range(n_chunks)]
    e_all = np.concatenate([p[0] for p in parts], axis=0)
    h_all = np.concatenate([p[1] for p in parts], axis=0)
    return e_all, h_all


def sample_outputs(classical: FieldConfiguration, region: Region,
                   res: Resolution, n: int, seed: int,
                   workers: int | None = None) -> list[FieldConfiguration]:
    """n independent measurement outputs around the classical configuration."""
    e_all, h_all = _draw_arrays(classical, region, res, n, seed, workers)
    return [FieldConfiguration(E=e_all[i], H=h_all[i]) for i in range(n)]


def empirical_stats(samples, classical: FieldConfiguration) -> SampleStats:
    """Square-average deviations from the classical configuration, plus the
    pooled per-component standard deviation."""
    if isinstance(samples, tuple) and len(samples) == 2:
        e_all, h_all = samples
    else:
        samples = list(samples)
        if not samples:
            raise ConstraintError("empirical_stats needs at least one sample")
        e_all = np.stack([s.E for s in samples])
        h_all = np.stack([s.H for s in samples])
    n = e_all.shape[0]
    mean = FieldConfiguration(E=e_all.mean(axis=0), H=h_all.mean(axis=0))
    dev_e = e_all - classical.E
    dev_h = h_all - classical.H
    var_e = float(np.mean((e_all - mean.E) ** 2))
    var_h = float(np.mean((h_all - mean.H) ** 2))
    return SampleStats(
        n=n,
        empirical_mean=mean,
        norm_deviation_E=float(np.mean(dev_e ** 2)),
        norm_deviation_H=float(np.mean(dev_h ** 2)),
        per_component_sd=math.sqrt(0.5 * (var_e + var_h)),
    )
