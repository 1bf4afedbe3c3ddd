"""Pydantic request/response models for the measurability service.

Numeric fields are validated here (positivity, ranges); unit conversion
happens in the handlers, so the core modules only ever see consistent
values.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

UnitsName = Literal["natural", "cgs"]
AlphaName = Literal["paper", "codata"]


class UnitChoice(BaseModel):
    units: UnitsName = "natural"
    alpha: AlphaName = "paper"


class RegimeRequest(UnitChoice):
    l: float = Field(gt=0, description="spatial size of the measurement box")
    tau: float = Field(gt=0, description="measurement duration")
    dE: float = Field(gt=0, description="device resolution, electric channel")
    dH: Optional[float] = Field(default=None, gt=0,
                                description="device resolution, magnetic channel "
                                            "(defaults to dE)")
    threshold: float = Field(default=10.0, gt=1.0,
                             description="classical/quantum classification ratio")


class RegimeResponse(BaseModel):
    l: float
    tau: float
    four_volume: float
    delta_E_out: float
    delta_H_out: float
    regime: str
    delta_opt: float
    delta_min: float


class ProbeRequest(UnitChoice):
    m: float = Field(gt=0, description="probe mass")
    tau: float = Field(gt=0, description="measurement duration")
    Omega: float = Field(ge=0, description="measured-motion frequency")
    omega: float = Field(ge=0, description="probe eigenfrequency (0 = free charge)")
    Q: float = Field(gt=0, description="probe charge")


class ProbeResponse(BaseModel):
    delta_x: float
    delta_F: float
    delta_E_mech: float


class LimitRequest(UnitChoice):
    l: float = Field(gt=0)
    tau: float = Field(gt=0)
    delta_x: Optional[float] = Field(default=None, gt=0)
    enforce_charge_quantization: bool = True


class LimitResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    l: float
    tau: float
    regime: str
    delta_E_abs: float
    Q_opt: float
    delta_x_used: float
    E_meas: float
    lam: float = Field(serialization_alias="lambda")
    subregion_count: int
    rho: float


class MapRequest(UnitChoice):
    l_min: float = Field(gt=0)
    l_max: float = Field(gt=0)
    tau_min: float = Field(gt=0)
    tau_max: float = Field(gt=0)
    grid: int = Field(ge=1, le=1000)


class MapRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    l: float
    tau: float
    rho: float
    regime: str
    delta_E_abs: float
    Q_opt: float
    lam: float = Field(serialization_alias="lambda")
    subregions: int


class MapResponse(BaseModel):
    rows: list[MapRow]


class EngineRequest(UnitChoice):
    modes: int = Field(ge=1, le=64)
    steps: int = Field(ge=2, le=512)
    l: float = Field(gt=0)
    tau: float = Field(gt=0)
    sweep_decades: float = Field(default=4.0, gt=0, le=12)
    points: int = Field(default=17, ge=8, le=200)


class SweepPoint(BaseModel):
    delta: float
    variance: float


class EngineResponse(BaseModel):
    modes: int
    steps: int
    four_volume: float
    delta_opt: float
    delta_min: float
    fit_C: float
    fit_p: float
    fit_residual: float
    rows: list[SweepPoint]


class SampleRequest(UnitChoice):
    l: float = Field(gt=0)
    tau: float = Field(gt=0)
    dE: float = Field(gt=0)
    dH: Optional[float] = Field(default=None, gt=0)
    n: int = Field(ge=1, le=10_000_000)
    seed: int = Field(ge=0)
    cells: int = Field(default=1, ge=1, le=4096)
    stats_only: bool = False


class SampleStatsBody(BaseModel):
    n: int
    per_component_sd: float
    norm_deviation_E: float
    norm_deviation_H: float
    mean_E: list[list[float]]
    mean_H: list[list[float]]
    delta_E_out: float
    delta_H_out: float


class SampleResponse(BaseModel):
    stats: SampleStatsBody
    samples_E: Optional[list[list[list[float]]]] = None
    samples_H: Optional[list[list[list[float]]]] = None


class HealthResponse(BaseModel):
    status: str
    version: str
