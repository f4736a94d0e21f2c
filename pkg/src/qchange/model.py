"""Gram-space model of the change-point discrimination task.

A source emits n particles; up to some position k it prepares |0> and from
k on it prepares |phi>, with overlap c = <0|phi>.  The n hypothesis states
|Psi_k> have Gram matrix G_ij = c^|i-j|, and every discrimination question
lives inside the n-dimensional span of the hypotheses, so we work with G,
an upper-triangular factor R (G = R^T R), and the reciprocal (dual) basis
throughout.  The physical tensor-product space never appears.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

# Trailing Cholesky pivots of G all equal 1 - c^2; below this the reciprocal
# basis is numerically meaningless even though c < 1.
PIVOT_FLOOR = 1e-13

PSD_TOL = 1e-10


class DomainError(ValueError):
    """Parameters outside the model domain (n < 2 or c outside [0, 1])."""


class SingularGramError(ValueError):
    """The Gram matrix is exactly singular (c = 1: all hypotheses identical)."""


class ConditioningError(ValueError):
    """c is so close to 1 that the triangular factor cannot be trusted."""

    def __init__(self, pivot: float):
        self.pivot = pivot
        super().__init__(f"Cholesky pivot 1 - c^2 = {pivot:.3e} below {PIVOT_FLOOR:.0e}")


class InfeasibleProfileError(ValueError):
    """An efficiency profile whose inconclusive element is not PSD."""

    def __init__(self, min_eig: float):
        self.min_eig = min_eig
        super().__init__(f"inconclusive element has minimum eigenvalue {min_eig:.3e}")


@dataclass(frozen=True)
class ProblemInstance:
    """A change-point task: n particles, overlap c = <0|phi>."""

    n: int
    c: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"need an integer n >= 2, got {self.n}")
        if not 0.0 <= self.c <= 1.0:
            raise DomainError(f"need 0 <= c <= 1, got {self.c}")


@dataclass(frozen=True)
class GramMatrix:
    instance: ProblemInstance
    entries: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class StateEmbedding:
    """Concrete coordinates for the hypotheses and their dual basis.

    ``r_factor`` is upper triangular with G = R^T R, so column k of R holds
    the coordinates of |Psi_k>.  ``reciprocal_vectors`` holds the (unnormalized)
    tilde states as rows: row k is row k of R^{-1}, the unique vector with
    <Phi~_k|Psi_l> = delta_kl.
    """

    instance: ProblemInstance
    r_factor: np.ndarray = field(repr=False)
    reciprocal_vectors: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class Povm:
    """Unambiguous POVM: E_k = gamma_k |Phi~_k><Phi~_k| plus the inconclusive E_0."""

    instance: ProblemInstance
    elements: np.ndarray = field(repr=False)      # shape (n, n, n)
    inconclusive: np.ndarray = field(repr=False)  # E_0 = 1 - sum_k E_k
    gammas: np.ndarray = field(repr=False)


def build_gram(instance: ProblemInstance) -> GramMatrix:
    """Gram matrix of the n change-point hypotheses.

    Parameters
    ----------
    instance : ProblemInstance

    Returns
    -------
    GramMatrix
        Symmetric Toeplitz matrix with entries c^|i-j| and unit diagonal.
    """
    idx = np.arange(instance.n)
    entries = np.float_power(instance.c, np.abs(idx[:, None] - idx[None, :]))
    return GramMatrix(instance, entries)


def factor_embedding(g: GramMatrix) -> StateEmbedding:
    """Upper-triangular factor R of G and the reciprocal basis.

    Raises
    ------
    SingularGramError
        If c = 1 (states linearly dependent).
    ConditioningError
        If c < 1 but the trailing pivot 1 - c^2 is below PIVOT_FLOOR.
    """
    inst = g.instance
    if inst.c == 1.0:
        raise SingularGramError("c = 1: Gram matrix has rank 1")
    pivot = 1.0 - inst.c ** 2
    if pivot < PIVOT_FLOOR:
        raise ConditioningError(pivot)
    try:
        lower = np.linalg.cholesky(g.entries)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by pivot check
        raise ConditioningError(pivot) from exc
    r = lower.T
    r_inv = solve_triangular(r, np.eye(inst.n))
    return StateEmbedding(inst, r, r_inv)


def build_povm(embedding: StateEmbedding, gammas) -> Povm:
    """Assemble the unambiguous POVM for a given efficiency profile.

    Parameters
    ----------
    embedding : StateEmbedding
    gammas : array_like or object with a ``gammas`` attribute
        Per-hypothesis conclusive probabilities, each in [0, 1].

    Raises
    ------
    InfeasibleProfileError
        If E_0 = 1 - sum_k gamma_k |Phi~_k><Phi~_k| has an eigenvalue
        below -PSD_TOL; the profile is then not realizable error-free.
    """
    gam = np.asarray(getattr(gammas, "gammas", gammas), dtype=float)
    n = embedding.instance.n
    if gam.shape != (n,):
        raise DomainError(f"profile length {gam.shape} does not match n = {n}")
    if np.any(gam < -PSD_TOL) or np.any(gam > 1.0 + PSD_TOL):
        raise DomainError("efficiencies must lie in [0, 1]")
    tilde = embedding.reciprocal_vectors
    elements = gam[:, None, None] * tilde[:, :, None] * tilde[:, None, :]
    inconclusive = np.eye(n) - elements.sum(axis=0)
    min_eig = float(np.linalg.eigvalsh(inconclusive)[0])
    if min_eig < -PSD_TOL:
        raise InfeasibleProfileError(min_eig)
    return Povm(embedding.instance, elements, inconclusive, gam)


def outcome_probabilities(povm: Povm, embedding: StateEmbedding) -> np.ndarray:
    """Born probabilities p[k, l] = <Psi_l| E_k |Psi_l> (conclusive outcomes only).

    Unambiguity makes this gamma_k * delta_kl up to roundoff; the simulator
    uses it as an independent cross-check of the outcome law.
    """
    states = embedding.r_factor  # column l = |Psi_l>
    return np.einsum("il,kij,jl->kl", states, povm.elements, states)
