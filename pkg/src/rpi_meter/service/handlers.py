"""Computation handlers shared by the HTTP endpoints and the CLI.

Each handler converts boundary units to natural units, delegates to the core
modules, and converts results back.  The CLI calls these functions
in-process; the FastAPI app exposes them over HTTP.
"""

from __future__ import annotations

import math

import numpy as np

from .. import backreaction, engine, probe, rpi_core, sampler
from ..units import UnitKind, constants
from . import schemas


def _system(req: schemas.UnitChoice):
    return constants(UnitKind(req.units), req.alpha)


def run_regime(req: schemas.RegimeRequest) -> schemas.RegimeResponse:
    system = _system(req)
    region = rpi_core.Region(l=system.length_to_natural(req.l),
                             tau=system.time_to_natural(req.tau))
    d_e = system.field_to_natural(req.dE)
    d_h = system.field_to_natural(req.dH) if req.dH is not None else d_e
    res = rpi_core.Resolution(delta_E_in=d_e, delta_H_in=d_h)
    report = rpi_core.output_uncertainty(region, res, threshold=req.threshold)
    return schemas.RegimeResponse(
        l=req.l,
        tau=req.tau,
        four_volume=region.four_volume(),
        delta_E_out=system.field_from_natural(report.delta_E_out),
        delta_H_out=system.field_from_natural(report.delta_H_out),
        regime=report.regime.value,
        delta_opt=system.field_from_natural(report.delta_opt),
        delta_min=system.field_from_natural(report.delta_min),
    )


def run_probe(req: schemas.ProbeRequest) -> schemas.ProbeResponse:
    system = _system(req)
    budget = probe.error_budget(req.m, req.tau, req.Omega, req.omega, req.Q, system)
    return schemas.ProbeResponse(
        delta_x=budget.delta_x,
        delta_F=budget.delta_F,
        delta_E_mech=budget.delta_E_mech,
    )


def run_limit(req: schemas.LimitRequest) -> schemas.LimitResponse:
    system = _system(req)
    plan = backreaction.MeasurementPlan(
        region=rpi_core.Region(l=req.l, tau=req.tau),
        delta_x=req.delta_x,
        enforce_charge_quantization=req.enforce_charge_quantization,
        system=system,
    )
    breakdown = backreaction.evaluate_plan(plan)
    return schemas.LimitResponse(
        l=req.l,
        tau=req.tau,
        regime=breakdown.regime.value,
        delta_E_abs=breakdown.delta_E_abs,
        Q_opt=breakdown.Q_opt,
        delta_x_used=breakdown.delta_x_used,
        E_meas=breakdown.E_meas,
        lam=breakdown.lam,
        subregion_count=breakdown.subregion_count,
        rho=req.l / (system.c * req.tau),
    )


def run_map(req: schemas.MapRequest) -> schemas.MapResponse:
    system = _system(req)
    ls = np.geomspace(req.l_min, req.l_max, req.grid)
    taus = np.geomspace(req.tau_min, req.tau_max, req.grid)
    rows = []
    for l in ls:
        for tau in taus:
            b = backreaction.absolute_limit(float(l), float(tau), system)
            rows.append(schemas.MapRow(
                l=float(l),
                tau=float(tau),
                rho=float(l) / (system.c * float(tau)),
                regime=b.regime.value,
                delta_E_abs=b.delta_E_abs,
                Q_opt=b.Q_opt,
                lam=b.lam,
                subregions=b.subregion_count,
            ))
    return schemas.MapResponse(rows=rows)


def run_engine(req: schemas.EngineRequest) -> schemas.EngineResponse:
    system = _system(req)
    region = rpi_core.Region(l=system.length_to_natural(req.l),
                             tau=system.time_to_natural(req.tau))
    _, model = engine.build_mode_model(region, req.modes, req.steps)
    omega_4v = region.four_volume()
    d_opt = math.sqrt(2.0 / omega_4v)
    half = req.sweep_decades / 2.0
    deltas = d_opt * np.logspace(-half, half, req.points)
    sweep = engine.variance_sweep(model, deltas)
    fit = engine.fit_variance_law(sweep, omega_4v)
    to_field = system.field_from_natural
    return schemas.EngineResponse(
        modes=req.modes,
        steps=req.steps,
        four_volume=omega_4v,
        delta_opt=to_field(d_opt),
        delta_min=to_field(2.0 / math.sqrt(omega_4v)),
        fit_C=fit.C,
        fit_p=fit.quantum_exponent,
        fit_residual=fit.residual,
        rows=[schemas.SweepPoint(delta=to_field(d), variance=to_field(1.0) ** 2 * v)
              for d, v in sweep],
    )


def run_sample(req: schemas.SampleRequest) -> schemas.SampleResponse:
    system = _system(req)
    region = rpi_core.Region(l=system.length_to_natural(req.l),
                             tau=system.time_to_natural(req.tau))
    d_e = system.field_to_natural(req.dE)
    d_h = system.field_to_natural(req.dH) if req.dH is not None else d_e
    res = rpi_core.Resolution(delta_E_in=d_e, delta_H_in=d_h)
    classical = sampler.FieldConfiguration.zeros(req.cells)
    e_all, h_all = sampler._draw_arrays(classical, region, res, req.n, req.seed)
    stats = sampler.empirical_stats((e_all, h_all), classical)
    report = rpi_core.output_uncertainty(region, res)
    f = system.field_from_natural
    body = schemas.SampleStatsBody(
        n=stats.n,
        per_component_sd=f(stats.per_component_sd),
        norm_deviation_E=f(1.0) ** 2 * stats.norm_deviation_E,
        norm_deviation_H=f(1.0) ** 2 * stats.norm_deviation_H,
        mean_E=(f(1.0) * stats.empirical_mean.E).tolist(),
        mean_H=(f(1.0) * stats.empirical_mean.H).tolist(),
        delta_E_out=f(report.delta_E_out),
        delta_H_out=f(report.delta_H_out),
    )
    if req.stats_only:
        return schemas.SampleResponse(stats=body)
    return schemas.SampleResponse(
        stats=body,
        samples_E=(f(1.0) * e_all).tolist(),
        samples_H=(f(1.0) * h_all).tolist(),
    )
