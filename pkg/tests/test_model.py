import numpy as np
import pytest

from qchange.model import (
    ConditioningError,
    DomainError,
    InfeasibleProfileError,
    ProblemInstance,
    SingularGramError,
    build_gram,
    build_povm,
    factor_embedding,
    outcome_probabilities,
)


def test_instance_validation():
    ProblemInstance(2, 0.0)
    ProblemInstance(100, 1.0)
    with pytest.raises(DomainError):
        ProblemInstance(1, 0.5)
    with pytest.raises(DomainError):
        ProblemInstance(5, -0.1)
    with pytest.raises(DomainError):
        ProblemInstance(5, 1.2)


def test_gram_entries():
    g = build_gram(ProblemInstance(2, 0.5))
    assert np.array_equal(g.entries, [[1.0, 0.5], [0.5, 1.0]])
    g4 = build_gram(ProblemInstance(4, 0.3))
    assert g4.entries[0, 3] == pytest.approx(0.027, abs=1e-15)
    assert np.allclose(g4.entries, g4.entries.T)


def test_gram_monotone_in_overlap_and_positive_definite():
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(2, 13))
        c1, c2 = np.sort(rng.random(2) * 0.99)
        g1 = build_gram(ProblemInstance(n, float(c1))).entries
        g2 = build_gram(ProblemInstance(n, float(c2))).entries
        assert np.all(g1 <= g2 + 1e-15)
        assert np.linalg.eigvalsh(g1)[0] > 0.0


def test_embedding_identity_at_zero_overlap():
    emb = factor_embedding(build_gram(ProblemInstance(2, 0.0)))
    assert np.allclose(emb.r_factor, np.eye(2))
    assert np.allclose(emb.reciprocal_vectors, np.eye(2))


def test_embedding_hand_cholesky():
    emb = factor_embedding(build_gram(ProblemInstance(2, 0.5)))
    assert np.allclose(emb.r_factor, [[1.0, 0.5], [0.0, np.sqrt(0.75)]])


def test_embedding_reconstructs_gram_and_biorthogonality():
    rng = np.random.default_rng(23)
    for _ in range(40):
        n = int(rng.integers(2, 15))
        c = float(rng.random() * 0.98)
        g = build_gram(ProblemInstance(n, c))
        emb = factor_embedding(g)
        r = emb.r_factor
        assert np.allclose(np.triu(r), r)  # canonical upper-triangular factor
        assert np.allclose(r.T @ r, g.entries, atol=1e-12)
        # reciprocal vectors pair off against the state columns
        assert np.allclose(emb.reciprocal_vectors @ r, np.eye(n), atol=1e-9)


def test_reciprocal_gram_is_inverse_gram():
    g = build_gram(ProblemInstance(3, 0.5))
    emb = factor_embedding(g)
    v = emb.reciprocal_vectors
    assert np.allclose(v @ v.T, np.linalg.inv(g.entries), atol=1e-12)
    # sum of outer products of the reciprocal vectors
    outer_sum = sum(np.outer(v[k], v[k]) for k in range(3))
    assert np.allclose(outer_sum, v.T @ v, atol=1e-10)


def test_singular_and_ill_conditioned_gram():
    with pytest.raises(SingularGramError):
        factor_embedding(build_gram(ProblemInstance(3, 1.0)))
    with pytest.raises(ConditioningError) as err:
        factor_embedding(build_gram(ProblemInstance(3, 1.0 - 1e-16)))
    assert "pivot" in str(err.value)


def test_povm_projective_at_zero_overlap():
    emb = factor_embedding(build_gram(ProblemInstance(2, 0.0)))
    povm = build_povm(emb, np.array([1.0, 1.0]))
    assert np.allclose(povm.inconclusive, 0.0, atol=1e-14)


def test_povm_unambiguity():
    from qchange.analytic import induced_efficiencies

    inst = ProblemInstance(3, 0.5)
    emb = factor_embedding(build_gram(inst))
    povm = build_povm(emb, induced_efficiencies(inst))
    p = outcome_probabilities(povm, emb)
    gammas = induced_efficiencies(inst).gammas
    # conclusive outcome k fires only on hypothesis k, with rate gamma_k
    assert np.allclose(np.diag(p), gammas, atol=1e-10)
    assert np.allclose(p - np.diag(np.diag(p)), 0.0, atol=1e-10)


def test_povm_completeness():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(2, 10))
        c = float(rng.random() * 0.9)
        from qchange.analytic import induced_efficiencies

        inst = ProblemInstance(n, c)
        prof = induced_efficiencies(inst)
        if np.any(prof.gammas < 0.0):
            continue
        emb = factor_embedding(build_gram(inst))
        povm = build_povm(emb, prof)
        total = povm.inconclusive + povm.elements.sum(axis=0)
        assert np.max(np.abs(total - np.eye(n))) <= 1e-12


def test_povm_rejects_infeasible_profile():
    emb = factor_embedding(build_gram(ProblemInstance(3, 0.5)))
    with pytest.raises(InfeasibleProfileError):
        build_povm(emb, np.array([1.0, 1.0, 1.0]))
