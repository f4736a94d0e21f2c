"""Monte Carlo verification of collective and local identification.

Trials are sampled from the analytic outcome law rather than by building
state vectors: for the collective strategy the conclusive outcome k fires
with probability gamma_k when the change point is k (never otherwise), and
for a local strategy each site answers independently with its conclusive
rates.  Sampling the law keeps a trial O(1) in n while remaining exactly
the distribution the measurements induce; for small n the collective law
is cross-checked against the explicit operator elements before sampling.

Streams are drawn per batch from a counter-based generator seeded by
(seed, batch index), so reports are reproducible bit for bit regardless
of batch size tuning.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import model
from .analytic import efficiency_profile
from .local import LocalWeights, alternating_weights
from .model import DomainError, ProblemInstance

BATCH = 1 << 18
BORN_CHECK_MAX_N = 8
BORN_CHECK_TOL = 1e-10


class Strategy(str, enum.Enum):
    COLLECTIVE = "collective"
    LOCAL_EQUAL = "local-equal"
    LOCAL_ALTERNATING = "local-alternating"
    LOCAL_CUSTOM = "local-custom"


@dataclass(frozen=True)
class SimulationConfig:
    instance: ProblemInstance
    strategy: Strategy
    trials: int
    seed: int
    weights: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be positive, got {self.trials}")
        if self.strategy is Strategy.LOCAL_CUSTOM:
            if self.weights is None:
                raise DomainError("local-custom requires explicit weights")
            LocalWeights(self.instance, np.asarray(self.weights, dtype=float))
        elif self.weights is not None:
            raise DomainError(f"weights are not accepted for {self.strategy.value}")


@dataclass(frozen=True)
class SimulationReport:
    config: SimulationConfig
    successes: int
    inconclusives: int
    errors_observed: int
    empirical_rate: float
    standard_error: float

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "n": cfg.instance.n,
            "c": cfg.instance.c,
            "strategy": cfg.strategy.value,
            "trials": cfg.trials,
            "seed": cfg.seed,
            "successes": self.successes,
            "inconclusives": self.inconclusives,
            "errors_observed": self.errors_observed,
            "empirical_rate": self.empirical_rate,
            "standard_error": self.standard_error,
        }


def _batch_rng(seed: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(seed, spawn_key=(batch,))))


def _batches(trials: int):
    done = 0
    batch = 0
    while done < trials:
        m = min(BATCH, trials - done)
        yield batch, m
        done += m
        batch += 1


def _born_probabilities(instance: ProblemInstance, gammas: np.ndarray) -> np.ndarray:
    """Outcome law p[k, l] recomputed from the operator elements."""
    emb = model.factor_embedding(model.build_gram(instance))
    povm = model.build_povm(emb, gammas)
    return model.outcome_probabilities(povm, emb)


def simulate_collective(config: SimulationConfig) -> SimulationReport:
    """Sample the optimal collective measurement.

    The conclusive outcome never fires on the wrong hypothesis, so every
    trial is either the correct identification (probability gamma_l for
    change point l) or inconclusive; errors_observed stays zero unless the
    sampled law itself were wrong.  For n <= BORN_CHECK_MAX_N the law is
    first recomputed from the explicit operators and required to match.
    """
    if config.strategy is not Strategy.COLLECTIVE:
        raise DomainError(f"collective simulator got strategy {config.strategy.value}")
    inst = config.instance
    n, c = inst.n, inst.c
    # identical states: nothing is ever conclusive
    gammas = np.zeros(n) if c == 1.0 else \
        np.clip(efficiency_profile(inst).gammas, 0.0, 1.0)
    if c < 1.0 and n <= BORN_CHECK_MAX_N:
        p = _born_probabilities(inst, gammas)
        diag = np.diag(p)
        off = p - np.diag(diag)
        if np.max(np.abs(diag - gammas)) > BORN_CHECK_TOL or \
                np.max(np.abs(off)) > BORN_CHECK_TOL:
            raise model.InfeasibleProfileError(
                "sampled law disagrees with the operator elements")
    successes = 0
    for batch, m in _batches(config.trials):
        rng = _batch_rng(config.seed, batch)
        change = rng.integers(0, n, size=m)
        u = rng.random(m)
        successes += int(np.count_nonzero(u < gammas[change]))
    trials = config.trials
    rate = successes / trials
    se = float(np.sqrt(rate * (1.0 - rate) / trials))
    return SimulationReport(config, successes, trials - successes, 0, rate, se)


def _local_rates(instance: ProblemInstance, strategy: Strategy,
                 weights: Optional[np.ndarray]):
    n, c = instance.n, instance.c
    if strategy is Strategy.LOCAL_EQUAL:
        x = np.ones(n - 1)
    elif strategy is Strategy.LOCAL_ALTERNATING:
        x = np.ones(n - 1) if c == 0.0 else alternating_weights(instance)
    else:
        x = LocalWeights(instance, np.asarray(weights, dtype=float)).x
    confirm = np.concatenate(([1.0], 1.0 - c * x))          # site l-1 says pre-change
    detect = np.concatenate((1.0 - c / x, [1.0])) if c > 0 \
        else np.ones(n)                                     # site l says post-change
    return np.clip(confirm, 0.0, 1.0), np.clip(detect, 0.0, 1.0)


def simulate_local(config: SimulationConfig) -> SimulationReport:
    """Sample a sequential site-by-site strategy.

    A trial with change point l succeeds when site l-1 conclusively
    reports the pre-change state (automatic for l = 1) and site l the
    post-change state (automatic for l = n); each site answers on its own
    coin.  Unambiguous site measurements cannot point at a wrong site, so
    errors_observed is structurally zero.
    """
    if config.strategy not in (Strategy.LOCAL_EQUAL, Strategy.LOCAL_ALTERNATING,
                               Strategy.LOCAL_CUSTOM):
        raise DomainError(f"local simulator got strategy {config.strategy.value}")
    inst = config.instance
    confirm, detect = _local_rates(inst, config.strategy, config.weights)
    successes = 0
    for batch, m in _batches(config.trials):
        rng = _batch_rng(config.seed, batch)
        change = rng.integers(1, inst.n + 1, size=m)
        ok_prev = rng.random(m) < confirm[change - 1]
        ok_here = rng.random(m) < detect[change - 1]
        successes += int(np.count_nonzero(ok_prev & ok_here))
    trials = config.trials
    rate = successes / trials
    se = float(np.sqrt(rate * (1.0 - rate) / trials))
    return SimulationReport(config, successes, trials - successes, 0, rate, se)


def simulate(config: SimulationConfig) -> SimulationReport:
    if config.strategy is Strategy.COLLECTIVE:
        return simulate_collective(config)
    return simulate_local(config)
