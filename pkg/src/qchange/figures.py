"""Reference figure data: efficiency profiles and strategy comparison curves."""

from __future__ import annotations

import numpy as np

from .analytic import (
    delta_shift,
    induced_efficiencies,
    modified_efficiencies,
    success_probability,
)
from .local import alternating_extremal, equal_efficiency_success, optimize_weights
from .model import DomainError, ProblemInstance

PROFILE_N, PROFILE_C = 20, 0.7
CURVES_N = 15
CURVES_GRID = np.round(np.arange(0.01, 1.00, 0.01), 2)


def efficiency_profile_rows(n: int = PROFILE_N, c: float = PROFILE_C):
    """Rows (k, gamma_k, gamma'_k) comparing the two POVM families.

    The induced profile gamma_k is optimal up to the critical overlap; past
    it the modified profile gamma'_k gives up two outcomes entirely (their
    induced efficiencies would have gone negative) to boost the rest.
    """
    inst = ProblemInstance(n, c)
    gammas = induced_efficiencies(inst).gammas
    primed = modified_efficiencies(inst).gammas
    columns = ["k", "gamma_k", "gamma_prime_k"]
    rows = [[float(k + 1), float(gammas[k]), float(primed[k])] for k in range(n)]
    return columns, rows


def strategy_curve_rows(n: int = CURVES_N, grid=None):
    """Rows comparing collective and local success over an overlap grid.

    Besides the optimal value, the two closed-form branches are continued
    across their whole validity range so the handover at the critical
    overlap is visible, as are the equal-efficiency, alternating, and
    numerically optimized local strategies.  The grid stays inside (0, 1):
    both endpoints are degenerate (at c = 0 the alternating pattern is
    unbounded, at c = 1 the states coincide).
    """
    grid = CURVES_GRID if grid is None else np.asarray(grid, dtype=float)
    if np.any(grid <= 0.0) or np.any(grid >= 1.0):
        raise DomainError("curve grid must lie strictly inside (0, 1)")
    columns = ["c", "success_probability", "region_i_extension",
               "region_ii_extension", "local_equal", "local_alternating",
               "local_optimized"]
    rows = []
    for c in grid:
        inst = ProblemInstance(n, float(c))
        sp = success_probability(inst)
        region_i = sp.value - sp.delta  # delta is 0 in region I
        region_ii = region_i + delta_shift(inst)
        rows.append([float(c), sp.value, region_i, region_ii,
                     equal_efficiency_success(inst),
                     alternating_extremal(inst).success,
                     optimize_weights(inst).success])
    return columns, rows
