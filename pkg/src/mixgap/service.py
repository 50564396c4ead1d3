"""HTTP surface: a stateless FastAPI app wrapping the report builders.

Every endpoint mirrors a CLI subcommand and returns the same JSON payload.
Validation errors map to 422 with a machine-readable code; solver failures
map to 500.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, field_validator

from . import chain, reports, trajectory
from .errors import (
    MixgapError,
    NoConvergenceError,
    EigensolverFailureError,
    MixingTimeOverflowError,
    NonErgodicError,
)


class MatrixPayload(BaseModel):
    d: int = Field(ge=1)
    rows: list[list[float]]

    @field_validator("rows")
    @classmethod
    def _square(cls, rows, info):
        d = info.data.get("d")
        if d is not None and (len(rows) != d or any(len(r) != d for r in rows)):
            raise ValueError(f"rows must form a {d} x {d} matrix")
        return rows

    def to_chain(self) -> chain.TransitionMatrix:
        try:
            return chain.TransitionMatrix(entries=np.asarray(self.rows, dtype=float))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail={"code": "bad_matrix", "message": str(exc)})


class SpectrumRequest(BaseModel):
    matrix: MatrixPayload
    k_max: int | None = Field(default=None, ge=1)
    xi: float = Field(default=0.25, gt=0, lt=0.5)


class SimulateRequest(BaseModel):
    matrix: MatrixPayload
    mu: str | list[float] = "stationary"
    m: int = Field(ge=1)
    seed: int


class SimulateResponse(BaseModel):
    d: int
    seed: int
    states: list[int]


class EstimateRequest(BaseModel):
    states: list[int]
    d: int = Field(ge=1)
    K: int | None = Field(default=None, ge=1)
    adaptive_eps: float | None = Field(default=None, gt=0)
    alpha: float = Field(default=1.0, gt=0)
    delta: float = Field(default=0.05, gt=0, lt=1)


class CoverageRequest(BaseModel):
    matrix: MatrixPayload
    m: int = Field(ge=2)
    n_runs: int = Field(ge=1)
    alpha: float = Field(default=1.0, gt=0)
    delta: float = Field(default=0.05, gt=0, lt=1)
    seed: int = 0
    K: int = Field(default=3, ge=1)


class FamilyRequest(BaseModel):
    family: Literal["star", "symmetric"]
    alpha: float
    d: int = Field(ge=1)
    p_bar: list[float] | None = None


def _wrap(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except NonErgodicError as exc:
        raise HTTPException(status_code=422, detail={"code": "non_ergodic", "message": str(exc)})
    except (NoConvergenceError, EigensolverFailureError, MixingTimeOverflowError) as exc:
        raise HTTPException(status_code=500, detail={"code": "solver_failure", "message": str(exc)})
    except (MixgapError, ValueError) as exc:
        raise HTTPException(status_code=422, detail={"code": "precondition", "message": str(exc)})


def create_app() -> FastAPI:
    app = FastAPI(title="mixgap", version="0.1.0")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/spectrum")
    def spectrum(req: SpectrumRequest) -> dict:
        return _wrap(reports.spectrum_report, req.matrix.to_chain(), req.k_max, req.xi)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest) -> SimulateResponse:
        tm = req.matrix.to_chain()
        mu = _wrap(reports.resolve_initial_law, req.mu, tm)
        traj = _wrap(trajectory.simulate, tm, mu, req.m, req.seed)
        return SimulateResponse(d=tm.dim, seed=req.seed, states=[int(s) for s in traj.states])

    @app.post("/estimate")
    def estimate(req: EstimateRequest) -> dict:
        def run():
            traj = trajectory.Trajectory(states=np.asarray(req.states, dtype=np.int64), d=req.d)
            return reports.estimate_report(traj, req.K, req.adaptive_eps, req.alpha, req.delta)

        return _wrap(run)

    @app.post("/coverage")
    def coverage(req: CoverageRequest) -> dict:
        return _wrap(
            reports.coverage_report,
            req.matrix.to_chain(),
            req.m,
            req.n_runs,
            req.alpha,
            req.delta,
            req.seed,
            K=req.K,
        )

    @app.post("/family")
    def family(req: FamilyRequest) -> dict:
        return _wrap(reports.family_report, req.family, req.alpha, req.d, p_bar=req.p_bar)

    return app


app = create_app()
