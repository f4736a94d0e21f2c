"""Exact identification of a change point in a sequence of quantum states.

A source emits n pure states, switching at an unknown position k from a
default state to a mutated one with real overlap c.  This package computes
the best probability of naming k without ever naming it wrongly, certifies
the answer with matched feasible points of the underlying semidefinite
program, compares it with measure-as-you-go strategies, and samples all of
it by Monte Carlo.
"""

from .analytic import (
    CriticalOverlap,
    DegenerateOverlapError,
    EfficiencyProfile,
    Regime,
    RegimeError,
    SuccessProbability,
    asymptotic_success,
    critical_overlap,
    delta_shift,
    efficiency_profile,
    regime_of,
    success_probability,
)
from .certify import (
    ConstructionError,
    MinorReport,
    OptimalityCertificate,
    OracleError,
    analytic_witness,
    certify,
    certify_grid,
    delta_k,
    kernel_reduce,
    minor_ratios,
    numeric_oracle,
)
from .local import (
    LocalStrategyResult,
    LocalWeights,
    SearchError,
    StrategyKind,
    alternating_extremal,
    alternating_weights,
    equal_efficiency_success,
    local_critical_overlap,
    optimize_weights,
    weighted_success,
)
from .model import (
    ConditioningError,
    DomainError,
    GramMatrix,
    InfeasibleProfileError,
    Povm,
    ProblemInstance,
    SingularGramError,
    StateEmbedding,
    build_gram,
    build_povm,
    factor_embedding,
    outcome_probabilities,
)
from .simulate import (
    SimulationConfig,
    SimulationReport,
    Strategy,
    simulate,
    simulate_collective,
    simulate_local,
)

__version__ = "0.1.0"
