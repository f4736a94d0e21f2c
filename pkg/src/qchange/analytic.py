"""Closed-form solution of the change-point discrimination problem.

Everything here is an explicit function of (n, c): the induced efficiencies
gamma_k, the critical overlap c* where gamma_2 first turns negative, the
modified region-II efficiencies gamma'_k built from the ansatz parameter b,
the piecewise optimal success probability, and its large-n form.  The two
regimes are

    region I  (c <= c*):  all induced efficiencies are feasible as they stand;
    region II (c >  c*):  gamma_2 < 0, and the optimum instead pins
                          gamma'_2 = gamma'_{n-1} = 0.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field

import numpy as np

from .model import ProblemInstance


class RegimeError(ValueError):
    """An operation specific to one overlap regime was called in the other."""


class DegenerateOverlapError(ValueError):
    """c = 1: all hypotheses coincide and the task degenerates."""


class Regime(str, enum.Enum):
    REGION_I = "I"
    REGION_II = "II"


@dataclass(frozen=True)
class EfficiencyProfile:
    instance: ProblemInstance
    regime: Regime
    gammas: np.ndarray = field(repr=False)
    b: float | None = None


@dataclass(frozen=True)
class SuccessProbability:
    instance: ProblemInstance
    value: float
    regime: Regime
    delta: float = 0.0        # region-II correction, <= 0
    degenerate: bool = False  # c = 1


@dataclass(frozen=True)
class CriticalOverlap:
    n: int
    value: float
    residual: float
    degenerate: bool = False  # n in {2, 4}: no root inside (0, 1)


def neg_pow(c: float, m) -> np.ndarray | float:
    """(-c)^m computed as a sign times c^m, stable for any integer m >= 0."""
    m_arr = np.asarray(m)
    sign = np.where(m_arr % 2 == 0, 1.0, -1.0)
    out = sign * np.float_power(c, m_arr)
    return float(out) if m_arr.ndim == 0 else out


def critical_function(n: int, c: float) -> float:
    """1 - c - c^2 - (-c)^(n-1); its root in (0, 1) is the critical overlap."""
    return 1.0 - c - c * c - neg_pow(c, n - 1)


def induced_efficiencies(instance: ProblemInstance) -> EfficiencyProfile:
    """Efficiencies induced by the equal-success ansatz (the region-I optimum).

    Returns the n values

        gamma_k = [1 - c - (-c)^k - (-c)^(n-k+1)] / (1 + c),

    equal to the alternating double sum sum_j (-c)^|k-j| summed in closed
    form.  No feasibility claim is made: outside region I gamma_2 < 0.
    """
    n, c = instance.n, instance.c
    if c == 1.0:
        # limit c -> 1 of the formula; every efficiency vanishes
        return EfficiencyProfile(instance, Regime.REGION_I, np.zeros(n))
    k = np.arange(1, n + 1)
    gam = (1.0 - c - neg_pow(c, k) - neg_pow(c, n - k + 1)) / (1.0 + c)
    return EfficiencyProfile(instance, Regime.REGION_I, gam)


def gamma2_closed_form(instance: ProblemInstance) -> float:
    """gamma_2 = [1 - c - c^2 - (-c)^(n-1)] / (1 + c); negative iff c > c*(n)."""
    return critical_function(instance.n, instance.c) / (1.0 + instance.c)


@functools.cache
def critical_overlap(n: int) -> CriticalOverlap:
    """Root c*(n) of 1 - c - c^2 - (-c)^(n-1) = 0 in (0, 1).

    For n >= 5 the root provably lies in [0.4, 0.8] (the polynomial part
    1 - c - c^2 dominates the exponentially small tail there), so bisection
    starts from that bracket.  For n < 5 a full-interval scan looks for a
    sign change; n = 2 and n = 4 have none — the polynomial factors with its
    only root at c = 1 — and are reported as degenerate with value 1.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if n >= 5:
        lo, hi = 0.4, 0.8
    else:
        grid = np.linspace(0.0, 1.0, 101)
        vals = [critical_function(n, c) for c in grid]
        bracket = None
        for i in range(len(grid) - 1):
            if vals[i] > 0.0 >= vals[i + 1] and grid[i + 1] < 1.0:
                bracket = (grid[i], grid[i + 1])
                break
        if bracket is None:
            return CriticalOverlap(n, 1.0, abs(critical_function(n, 1.0)), degenerate=True)
        lo, hi = bracket
    flo = critical_function(n, lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fmid = critical_function(n, mid)
        if (flo > 0) == (fmid > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return CriticalOverlap(n, root, abs(critical_function(n, root)))


def regime_of(instance: ProblemInstance) -> Regime:
    """Region I for c <= c*(n) (and always for n in {2, 4}), region II above."""
    crit = critical_overlap(instance.n)
    if crit.degenerate or instance.c <= crit.value:
        return Regime.REGION_I
    return Regime.REGION_II


def modified_b(instance: ProblemInstance) -> float:
    """Ansatz parameter b = 1 - gamma_2 / (1 + (-c)^(n-3)) nullifying gamma'_2.

    Only defined for c >= c*(n); there gamma_2 <= 0 and b >= 1.
    """
    n, c = instance.n, instance.c
    if c == 1.0:
        raise DegenerateOverlapError("c = 1")
    crit = critical_overlap(n)
    if crit.degenerate or c < crit.value:
        raise RegimeError(f"b is defined for c >= c*({n}) = {crit.value:.6f}, got c = {c}")
    return 1.0 - gamma2_closed_form(instance) / (1.0 + neg_pow(c, n - 3))


def modified_efficiencies(instance: ProblemInstance) -> EfficiencyProfile:
    """Region-II efficiencies gamma'_k with gamma'_2 = gamma'_{n-1} = 0.

    gamma'_k = gamma_k - (1 - b) [(-c)^|k-2| + (-c)^|n-k-1|].
    """
    n, c = instance.n, instance.c
    b = modified_b(instance)  # also validates the regime
    gam = induced_efficiencies(instance).gammas
    k = np.arange(1, n + 1)
    corr = (1.0 - b) * (neg_pow(c, np.abs(k - 2)) + neg_pow(c, np.abs(n - k - 1)))
    return EfficiencyProfile(instance, Regime.REGION_II, gam - corr, b=b)


def efficiency_profile(instance: ProblemInstance) -> EfficiencyProfile:
    """The regime-appropriate optimal profile."""
    if regime_of(instance) is Regime.REGION_I:
        return induced_efficiencies(instance)
    return modified_efficiencies(instance)


def delta_shift(instance: ProblemInstance) -> float:
    """Region-II correction Delta = -(2/n) gamma_2^2 / (1 + (-c)^(n-3)).

    Evaluable for any c < 1; it is the actual shift of the optimum only
    above the critical overlap (below, gamma_2 > 0 and the induced profile
    already wins), which makes it a natural continuation of the region-II
    branch across the whole overlap range.
    """
    n, c = instance.n, instance.c
    if c == 1.0:
        raise DegenerateOverlapError("c = 1")
    g2 = gamma2_closed_form(instance)
    return -2.0 * g2 * g2 / (n * (1.0 + neg_pow(c, n - 3)))


def success_probability(instance: ProblemInstance) -> SuccessProbability:
    """Optimal probability of unambiguously identifying the change point.

    Region I evaluates

        P_s = (1 - c)/(1 + c) + (1/n) 2c [1 - (-c)^n] / (1 + c)^2,

    and region II adds the (negative) correction

        Delta = -(2/n) gamma_2^2 / (1 + (-c)^(n-3)).

    Both equal the mean of the corresponding efficiency profile.  c = 1 is
    degenerate (identical hypotheses); the continuity value 0 is reported
    with the flag set.
    """
    n, c = instance.n, instance.c
    if c == 1.0:
        return SuccessProbability(instance, 0.0, Regime.REGION_I, degenerate=True)
    base = (1.0 - c) / (1.0 + c) + 2.0 * c * (1.0 - neg_pow(c, n)) / (n * (1.0 + c) ** 2)
    if regime_of(instance) is Regime.REGION_I:
        return SuccessProbability(instance, base, Regime.REGION_I)
    delta = delta_shift(instance)
    return SuccessProbability(instance, base + delta, Regime.REGION_II, delta=delta)


GOLDEN_INVERSE = (np.sqrt(5.0) - 1.0) / 2.0


def asymptotic_success(c: float, n: int) -> float:
    """Large-n success probability with the exponentially small c^n terms dropped.

    Two branches meeting at c = (sqrt(5) - 1)/2, where 1 - c - c^2 = 0 makes
    the region-II correction vanish and the formula continuous.
    """
    if not 0.0 <= c < 1.0:
        raise ValueError(f"need 0 <= c < 1, got {c}")
    base = (1.0 - c) / (1.0 + c) + 2.0 * c / (n * (1.0 + c) ** 2)
    if c <= GOLDEN_INVERSE:
        return base
    return base - (2.0 / n) * ((1.0 - c - c * c) / (1.0 + c)) ** 2
