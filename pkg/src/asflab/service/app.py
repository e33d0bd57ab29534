"""FastAPI application wrapping the core package.

Run with: uvicorn asflab.service.app:app

Error contract: incommensurate parameters map to HTTP 409, other domain and
configuration errors to HTTP 400, both with body
{"error": {"kind": ..., "message": ...}}.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import IncommensurateParameters
from . import handlers
from .schemas import (
    CheckRequest,
    HealthResponse,
    OracleRequest,
    OracleResponse,
    ReportRequest,
    ReportResponse,
    ScaleStudyRequest,
    ScaleStudyResponse,
    SweepRequest,
    SweepResponse,
    VerdictResponse,
)

app = FastAPI(title="asf-lab", version=__version__)


@app.exception_handler(IncommensurateParameters)
async def incommensurate_handler(request: Request, exc: IncommensurateParameters):
    return JSONResponse(
        status_code=409,
        content={"error": {"kind": "incommensurate", "message": str(exc)}},
    )


@app.exception_handler(ValueError)
async def config_error_handler(request: Request, exc: ValueError):
    return JSONResponse(
        status_code=400,
        content={"error": {"kind": "config", "message": str(exc)}},
    )


@app.get("/health", response_model=HealthResponse)
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/check", response_model=VerdictResponse)
def check(req: CheckRequest):
    return handlers.check(req)


@app.post("/oracle", response_model=OracleResponse)
def oracle(req: OracleRequest):
    return handlers.oracle(req)


@app.post("/scale-study", response_model=ScaleStudyResponse)
def scale_study(req: ScaleStudyRequest):
    return handlers.study(req)


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest):
    return handlers.sweep(req)


@app.post("/report", response_model=ReportResponse)
def report(req: ReportRequest):
    return handlers.report(req)
