"""HTTP service exposing the solver, certification, figures, and simulation.

All numerics live in the core modules; endpoints validate, dispatch, and
shape responses.  Domain degeneracies (c = 1, bad strategy names, weight
boxes) map to 422 so callers can distinguish bad inputs from failures of
certification or statistics, which are reported in-band.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__, figures
from .analytic import (
    DegenerateOverlapError,
    Regime,
    RegimeError,
    critical_overlap,
    efficiency_profile,
    success_probability,
)
from .certify import certify, certify_grid, kernel_reduce, minor_ratios
from .local import (
    LocalWeights,
    alternating_extremal,
    equal_efficiency_success,
    weighted_success,
)
from .model import DomainError, ProblemInstance
from .schemas import (
    CertifyGridRequest,
    CertifyGridResponse,
    CertifyRequest,
    CertifyResponse,
    ComputeRequest,
    ComputeResponse,
    FigureResponse,
    HealthResponse,
    MinorReportModel,
    SimulateRequest,
    SimulateResponse,
)
from .simulate import SimulationConfig, Strategy, simulate

app = FastAPI(title="qchange", version=__version__)

_DOMAIN_ERRORS = (DomainError, RegimeError, DegenerateOverlapError, ValueError)


def _instance(n: int, c: float) -> ProblemInstance:
    try:
        return ProblemInstance(n, c)
    except DomainError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/compute", response_model=ComputeResponse)
def compute(req: ComputeRequest) -> ComputeResponse:
    inst = _instance(req.n, req.c)
    sp = success_probability(inst)
    crit = critical_overlap(req.n)
    if sp.degenerate:  # c = 1: nothing is ever conclusive
        gammas, b = np.zeros(req.n), None
    else:
        prof = efficiency_profile(inst)
        gammas, b = prof.gammas, prof.b
    return ComputeResponse(
        n=req.n, c=req.c, regime=sp.regime.value,
        success_probability=sp.value, delta=sp.delta, degenerate=sp.degenerate,
        critical_overlap=crit.value, critical_overlap_degenerate=crit.degenerate,
        gammas=[float(g) for g in gammas], b=b)


def _certificate_response(inst: ProblemInstance, tol: float, feas_tol: float,
                          with_minors: bool) -> CertifyResponse:
    cert = certify(inst, tol=tol, feas_tol=feas_tol)
    minors = None
    if with_minors:
        if cert.regime is Regime.REGION_I:
            rep = minor_ratios(inst)
            minors = MinorReportModel(
                kind="sylvester-chain", minors=list(rep.minors),
                all_positive=rep.all_positive, ratios=list(rep.ratios))
        else:
            rep = kernel_reduce(inst)
            minors = MinorReportModel(
                kind="kernel-reduction", minors=list(rep.minors),
                all_positive=rep.all_positive,
                kernel_residual=rep.kernel_residual)
    d = cert.to_dict()
    return CertifyResponse(
        n=d["n"], c=d["c"], regime=d["regime"],
        primal_value=d["primal_value"], dual_value=d["dual_value"], gap=d["gap"],
        primal_feasible=d["primal_feasible"], dual_feasible=d["dual_feasible"],
        certified=d["certified"], min_eig_primal=d["min_eig_primal"],
        min_gamma=d["min_gamma"], min_dual_square=d["min_dual_square"],
        tolerance=d["tolerance"], minor_report=minors)


@app.post("/certify", response_model=CertifyResponse)
def certify_endpoint(req: CertifyRequest) -> CertifyResponse:
    inst = _instance(req.n, req.c)
    try:
        return _certificate_response(inst, req.tol, req.feas_tol, with_minors=True)
    except _DOMAIN_ERRORS as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/certify/grid", response_model=CertifyGridResponse)
def certify_grid_endpoint(req: CertifyGridRequest) -> CertifyGridResponse:
    if req.c_stop < req.c_start:
        raise HTTPException(status_code=422, detail="c_stop must be >= c_start")
    grid = np.arange(req.c_start, req.c_stop + 0.5 * req.c_step, req.c_step)
    grid = grid[(grid >= 0.0) & (grid < 1.0)]
    if grid.size == 0:
        raise HTTPException(status_code=422, detail="empty overlap grid")
    try:
        certs = certify_grid(req.n, grid, tol=req.tol, feas_tol=req.feas_tol)
    except _DOMAIN_ERRORS as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    rows = []
    for cert in certs:
        d = cert.to_dict()
        rows.append(CertifyResponse(
            n=d["n"], c=d["c"], regime=d["regime"],
            primal_value=d["primal_value"], dual_value=d["dual_value"],
            gap=d["gap"], primal_feasible=d["primal_feasible"],
            dual_feasible=d["dual_feasible"], certified=d["certified"],
            min_eig_primal=d["min_eig_primal"], min_gamma=d["min_gamma"],
            min_dual_square=d["min_dual_square"], tolerance=d["tolerance"]))
    return CertifyGridResponse(rows=rows,
                               all_certified=all(r.certified for r in rows))


def _analytic_target(inst: ProblemInstance, strategy: Strategy, weights) -> float:
    if strategy is Strategy.COLLECTIVE:
        return success_probability(inst).value
    if strategy is Strategy.LOCAL_EQUAL:
        return equal_efficiency_success(inst)
    if strategy is Strategy.LOCAL_ALTERNATING:
        return alternating_extremal(inst).success
    return weighted_success(inst, LocalWeights(inst, np.asarray(weights, dtype=float)))


@app.post("/simulate", response_model=SimulateResponse)
def simulate_endpoint(req: SimulateRequest) -> SimulateResponse:
    inst = _instance(req.n, req.c)
    try:
        strategy = Strategy(req.strategy)
        weights = None if req.weights is None else np.asarray(req.weights, dtype=float)
        config = SimulationConfig(inst, strategy, req.trials, req.seed, weights)
        target = _analytic_target(inst, strategy, weights)
        report = simulate(config)
    except _DOMAIN_ERRORS as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    se = float(np.sqrt(target * (1.0 - target) / req.trials))
    if se > 0.0:
        sigma = abs(report.empirical_rate - target) / se
    else:
        sigma = 0.0 if report.empirical_rate == target else float("inf")
    within = sigma <= 4.0
    return SimulateResponse(
        n=req.n, c=req.c, strategy=strategy.value, trials=req.trials,
        seed=req.seed, successes=report.successes,
        inconclusives=report.inconclusives,
        errors_observed=report.errors_observed,
        empirical_rate=report.empirical_rate,
        standard_error=report.standard_error,
        analytic_rate=target, sigma_distance=sigma,
        within_four_sigma=within,
        passed=within and report.errors_observed == 0)


@app.get("/figure/{figure_id}", response_model=FigureResponse)
def figure(figure_id: int) -> FigureResponse:
    if figure_id == 1:
        columns, rows = figures.efficiency_profile_rows()
    elif figure_id == 2:
        columns, rows = figures.strategy_curve_rows()
    else:
        raise HTTPException(status_code=404, detail=f"no figure {figure_id}")
    return FigureResponse(figure_id=figure_id, columns=columns, rows=rows)
