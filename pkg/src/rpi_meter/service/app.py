"""FastAPI application exposing the measurability calculators over HTTP."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import ConstraintError, NumericalError
from . import handlers, schemas

app = FastAPI(
    title="rpi-meter",
    description="Quantum limits on electromagnetic-field measurability: "
                "output-uncertainty law, probe error budgets, absolute limits, "
                "lattice verification engine, and output sampling.",
    version=__version__,
)


@app.exception_handler(ConstraintError)
async def _constraint_error(request: Request, exc: ConstraintError):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(NumericalError)
async def _numerical_error(request: Request, exc: NumericalError):
    return JSONResponse(status_code=500, content={"detail": str(exc)})


@app.get("/health", response_model=schemas.HealthResponse)
def health() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=__version__)


@app.post("/regime", response_model=schemas.RegimeResponse)
def regime(req: schemas.RegimeRequest) -> schemas.RegimeResponse:
    return handlers.run_regime(req)


@app.post("/probe", response_model=schemas.ProbeResponse)
def probe(req: schemas.ProbeRequest) -> schemas.ProbeResponse:
    return handlers.run_probe(req)


@app.post("/limit", response_model=schemas.LimitResponse)
def limit(req: schemas.LimitRequest) -> schemas.LimitResponse:
    return handlers.run_limit(req)


@app.post("/map", response_model=schemas.MapResponse)
def map_(req: schemas.MapRequest) -> schemas.MapResponse:
    return handlers.run_map(req)


@app.post("/engine", response_model=schemas.EngineResponse)
def engine(req: schemas.EngineRequest) -> schemas.EngineResponse:
    return handlers.run_engine(req)


@app.post("/sample", response_model=schemas.SampleResponse)
def sample(req: schemas.SampleRequest) -> schemas.SampleResponse:
    return handlers.run_sample(req)
