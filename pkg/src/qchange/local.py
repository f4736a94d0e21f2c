"""Local (online) strategies: measure the particles one at a time.

Each site i < n carries a two-outcome-plus-inconclusive unambiguous
measurement biased by a weight x_i in [c, 1/c]: it reports the pre-change
state conclusively with probability 1 - c x_i and the post-change state
with probability 1 - c / x_i.  The change point k is identified when site
k-1 conclusively reports the pre-change state and site k the post-change
one, with the boundary conventions x_0 = 0 and 1/x_n = 0 (the virtual
site 0 always confirms, and site n always detects).  The average success
probability is

    P = (1/n) sum_k (1 - c x_{k-1}) (1 - c / x_k).

Equal weights x = 1 give the equal-efficiency baseline (1-c)^2 + 2c(1-c)/n;
the alternating extremal choice x = (1/c, c, 1/c, ...) gives up every other
site to detect the remaining ones perfectly and wins for large overlaps.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .model import DomainError, ProblemInstance

WEIGHT_TOL = 1e-12
ASCENT_STOP = 1e-14
RANDOM_STARTS = 8


class SearchError(RuntimeError):
    """No strategy crossing found where one was expected."""


class StrategyKind(str, enum.Enum):
    EQUAL = "equal-efficiency"
    ALTERNATING = "alternating-extremal"
    OPTIMIZED = "optimized"


@dataclass(frozen=True)
class LocalWeights:
    """Interior weights x_1..x_{n-1}; the x_0 and x_n conventions are implicit."""

    instance: ProblemInstance
    x: np.ndarray = field(repr=False)

    def __post_init__(self):
        n, c = self.instance.n, self.instance.c
        if self.x.shape != (n - 1,):
            raise DomainError(f"need {n - 1} interior weights, got shape {self.x.shape}")
        hi = np.inf if c == 0.0 else 1.0 / c
        if np.any(self.x < c - WEIGHT_TOL) or np.any(self.x > hi + WEIGHT_TOL):
            raise DomainError("weights must lie in [c, 1/c]")


@dataclass(frozen=True)
class LocalStrategyResult:
    weights: LocalWeights
    success: float
    strategy_kind: StrategyKind
    degenerate: bool = False  # c = 0 fallback


def equal_efficiency_success(instance: ProblemInstance) -> float:
    """Success of the equal-priors strategy: (1-c)^2 + 2c(1-c)/n."""
    n, c = instance.n, instance.c
    return (1.0 - c) ** 2 + 2.0 * c * (1.0 - c) / n


def weighted_success(instance: ProblemInstance, weights) -> float:
    """Average success probability of a weighted sequential strategy."""
    x = weights.x if isinstance(weights, LocalWeights) else \
        LocalWeights(instance, np.asarray(weights, dtype=float)).x
    c = instance.c
    confirm = 1.0 - c * np.concatenate(([0.0], x))          # site k-1 reports pre-change
    detect = np.concatenate((1.0 - c / x, [1.0])) if c > 0 \
        else np.ones(instance.n)                            # site k reports post-change
    return float(np.mean(confirm * detect))


def alternating_weights(instance: ProblemInstance, insertion: int | None = None) -> np.ndarray:
    """The extremal pattern x = (1/c, c, 1/c, ...).

    For even n the pure pattern would waste the last site, so one weight
    x_p = 1 is inserted at an odd position p (the parity of the tail flips
    past it).  Any odd interior p gives the same success; the default is
    the middle odd index, except n in {2, 4} where only p = 1 exists.
    """
    n, c = instance.n, instance.c
    if c == 0.0:
        raise DomainError("alternating weights are unbounded at c = 0")
    if n % 2 == 1:
        if insertion is not None:
            raise DomainError("insertion position applies to even n only")
        return np.array([1.0 / c if j % 2 == 1 else c for j in range(1, n)])
    p = insertion if insertion is not None else (1 if n <= 4 else (n // 2) | 1)
    if not (1 <= p <= n - 1 and p % 2 == 1):
        raise DomainError(f"insertion position must be an odd index in [1, {n - 1}]")
    x = np.empty(n - 1)
    for j in range(1, n):
        if j == p:
            x[j - 1] = 1.0
        elif j < p:
            x[j - 1] = 1.0 / c if j % 2 == 1 else c
        else:
            x[j - 1] = 1.0 / c if j % 2 == 0 else c
    return x


def alternating_extremal(instance: ProblemInstance,
                         insertion: int | None = None) -> LocalStrategyResult:
    """Success of the alternating extremal strategy.

    At c = 0 the pattern is undefined (1/c diverges); every strategy then
    succeeds with certainty, and the equal-efficiency result is returned
    with the degenerate flag set.
    """
    if instance.c == 0.0:
        w = LocalWeights(instance, np.ones(instance.n - 1))
        return LocalStrategyResult(w, equal_efficiency_success(instance),
                                   StrategyKind.ALTERNATING, degenerate=True)
    w = LocalWeights(instance, alternating_weights(instance, insertion))
    return LocalStrategyResult(w, weighted_success(instance, w), StrategyKind.ALTERNATING)


def _ascend(instance: ProblemInstance, x0: np.ndarray, iterations: int) -> np.ndarray:
    """Cyclic coordinate ascent with exact 1-D updates.

    Holding the neighbors fixed, the terms containing x_j are
    a_j + b_j - c (a_j / x_j + b_j x_j) with a_j = 1 - c x_{j-1} and
    b_j = 1 - c / x_{j+1}, maximized at x_j = sqrt(a_j / b_j) clipped to
    [c, 1/c].  Odd-indexed coordinates are independent given the even ones
    and vice versa, so each half-sweep is a closed-form block update and
    the objective never decreases.
    """
    n, c = instance.n, instance.c
    lo, hi = c, 1.0 / c
    x = np.concatenate(([0.0], x0, [np.inf]))  # virtual x_0 and x_n
    best = weighted_success(instance, x[1:-1])
    for _ in range(iterations):
        for start in (1, 2):
            j = np.arange(start, n, 2)
            a = 1.0 - c * x[j - 1]
            b = 1.0 - c / x[j + 1]
            with np.errstate(divide="ignore", invalid="ignore"):
                opt = np.sqrt(a / b)
            opt[(b <= 0.0) | np.isnan(opt)] = hi
            opt[a <= 0.0] = lo
            x[j] = np.clip(opt, lo, hi)
        now = weighted_success(instance, x[1:-1])
        if now - best < ASCENT_STOP:
            break
        best = now
    return x[1:-1]


def optimize_weights(instance: ProblemInstance, iterations: int = 200,
                     seed: int = 0) -> LocalStrategyResult:
    """Best weighted strategy found by multi-started coordinate ascent.

    Starts from equal weights, the alternating pattern, and RANDOM_STARTS
    log-uniform random draws from the box; the best final value wins, ties
    going to the earliest start.  The reported kind says which named
    strategy the optimum coincides with (within 1e-9), if any.
    """
    n, c = instance.n, instance.c
    if c == 0.0:
        w = LocalWeights(instance, np.ones(n - 1))
        return LocalStrategyResult(w, 1.0, StrategyKind.EQUAL)
    starts = [np.ones(n - 1), alternating_weights(instance)]
    rng = np.random.default_rng(seed)
    span = np.log(1.0 / c) - np.log(c)
    for _ in range(RANDOM_STARTS):
        starts.append(np.exp(np.log(c) + span * rng.random(n - 1)))
    best_x, best_val = None, -np.inf
    for x0 in starts:
        x = _ascend(instance, x0, iterations)
        val = weighted_success(instance, x)
        if val > best_val:
            best_x, best_val = x, val
    equal_val = equal_efficiency_success(instance)
    alt_val = alternating_extremal(instance).success
    if abs(best_val - alt_val) <= 1e-9:
        kind = StrategyKind.ALTERNATING
    elif abs(best_val - equal_val) <= 1e-9:
        kind = StrategyKind.EQUAL
    else:
        kind = StrategyKind.OPTIMIZED
    return LocalStrategyResult(LocalWeights(instance, best_x), best_val, kind)


def local_critical_overlap(n: int) -> float:
    """Overlap where the alternating strategy overtakes equal efficiencies.

    Bisection on the difference of the two success curves; for large n the
    crossing approaches sqrt(2) - 1 (where (1-c)^2 = (1-c^2)^2 / 2).

    Raises
    ------
    SearchError
        If no sign change is found in (0, 1).
    """
    if n < 5:
        raise DomainError(f"a finite-n crossing needs n >= 5, got {n}")

    def h(c: float) -> float:
        inst = ProblemInstance(n, c)
        return alternating_extremal(inst).success - equal_efficiency_success(inst)

    grid = np.linspace(0.01, 0.99, 99)
    vals = [h(c) for c in grid]
    bracket = None
    for i in range(len(grid) - 1):
        if vals[i] < 0.0 <= vals[i + 1]:
            bracket = (grid[i], grid[i + 1])
            break
    if bracket is None:
        raise SearchError(f"no crossing for n = {n}: h(0.01) = {vals[0]:.3e}, "
                          f"h(0.99) = {vals[-1]:.3e}")
    lo, hi = bracket
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if h(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
