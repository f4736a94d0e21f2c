"""Request and response bodies for the HTTP service."""

from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, Field


class ComputeRequest(BaseModel):
    n: int = Field(ge=2)
    c: float = Field(ge=0.0, le=1.0)


class ComputeResponse(BaseModel):
    n: int
    c: float
    regime: str
    success_probability: float
    delta: float
    degenerate: bool
    critical_overlap: float
    critical_overlap_degenerate: bool
    gammas: List[float]
    b: Optional[float] = None


class CertifyRequest(BaseModel):
    n: int = Field(ge=2)
    c: float = Field(ge=0.0, le=1.0)
    tol: float = Field(default=1e-9, gt=0.0)
    feas_tol: float = Field(default=1e-10, gt=0.0)


class MinorReportModel(BaseModel):
    kind: str  # "sylvester-chain" (region I) or "kernel-reduction" (region II)
    minors: List[float]
    all_positive: bool
    ratios: Optional[List[float]] = None
    kernel_residual: Optional[float] = None


class CertifyResponse(BaseModel):
    n: int
    c: float
    regime: str
    primal_value: float
    dual_value: float
    gap: float
    primal_feasible: bool
    dual_feasible: bool
    certified: bool
    min_eig_primal: float
    min_gamma: float
    min_dual_square: float
    tolerance: float
    minor_report: Optional[MinorReportModel] = None


class CertifyGridRequest(BaseModel):
    n: int = Field(ge=2)
    c_start: float = Field(ge=0.0, le=1.0)
    c_stop: float = Field(ge=0.0, le=1.0)
    c_step: float = Field(gt=0.0)
    tol: float = Field(default=1e-9, gt=0.0)
    feas_tol: float = Field(default=1e-10, gt=0.0)


class CertifyGridResponse(BaseModel):
    rows: List[CertifyResponse]
    all_certified: bool


class SimulateRequest(BaseModel):
    n: int = Field(ge=2)
    c: float = Field(ge=0.0, le=1.0)
    strategy: str
    trials: int = Field(ge=1)
    seed: int = Field(default=0, ge=0)
    weights: Optional[List[float]] = None


class SimulateResponse(BaseModel):
    n: int
    c: float
    strategy: str
    trials: int
    seed: int
    successes: int
    inconclusives: int
    errors_observed: int
    empirical_rate: float
    standard_error: float
    analytic_rate: float
    sigma_distance: float
    within_four_sigma: bool
    passed: bool


class FigureResponse(BaseModel):
    figure_id: int
    columns: List[str]
    rows: List[List[float]]


class HealthResponse(BaseModel):
    status: str
    version: str
