"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field


class TripleIn(BaseModel):
    """One side's lattice parameters."""

    shift: float
    mod_step: float
    win_len: float


class TolerancesIn(BaseModel):
    eps_singular: float = 1e-8
    kappa_max: float = 1e8
    tol: float = 1e-10
    max_iter: int = 1000
    restarts: int = 5
    seed: int = 0
    dense_cap: int = 4096
    stable_spread: float = 0.10
    decay_factor: float = 2.0


class CheckRequest(BaseModel):
    p: float
    synth: TripleIn
    anal: Optional[TripleIn] = None  # defaults to the synthesis triple
    grid_res: float
    period: float
    tolerances: Optional[TolerancesIn] = None


class VerdictResponse(BaseModel):
    classification: Literal["ASF", "NOT_ASF", "UNDECIDED"]
    lower: float
    upper: float
    condition: Union[float, Literal["inf"]]
    bessel_bound: float
    model: dict
    tolerances: dict


class OracleRequest(BaseModel):
    synth: TripleIn
    grid_res: float
    period: float


class OracleResponse(BaseModel):
    g_min: int
    g_max: int
    lower: float
    upper: float
    covering: list[int]


class ScaleStudyRequest(BaseModel):
    p: float
    synth: TripleIn
    anal: Optional[TripleIn] = None
    period: float
    sizes: list[int]
    tolerances: Optional[TolerancesIn] = None


class ScaleRowOut(BaseModel):
    L: int
    lower: float
    upper: float
    condition: Union[float, Literal["inf"]]
    classification: Literal["ASF", "NOT_ASF", "UNDECIDED"]


class SkippedSizeOut(BaseModel):
    L: int
    reason: str


class ScaleStudyResponse(BaseModel):
    rows: list[ScaleRowOut]
    skipped: list[SkippedSizeOut]
    trend: Literal["STABLE", "DEGENERATING", "INCONCLUSIVE"]
    thresholds: dict


class SweepModelIn(BaseModel):
    period: float
    size: Optional[int] = None
    sizes: Optional[list[int]] = None


class SweepSpecIn(BaseModel):
    axes: dict
    model: SweepModelIn
    tolerances: Optional[TolerancesIn] = None
    seed: int = 0


class SweepRequest(BaseModel):
    spec: SweepSpecIn
    workers: int = Field(default=1, ge=1)
    partial_csv: Optional[str] = None  # resume from a previously written table
    timing: bool = False


class SweepResponse(BaseModel):
    csv: str
    rows: int
    skipped: int
    spec_hash: str


class ReportRequest(BaseModel):
    csv: str
    x_axis: str
    y_axis: str
    metric: Literal["classification", "condition"]
    fixed: dict = Field(default_factory=dict)


class ReportResponse(BaseModel):
    pgm_base64: str
    width: int
    height: int


class HealthResponse(BaseModel):
    status: str
    version: str
