import numpy as np
import pytest

from qchange.analytic import (
    DegenerateOverlapError,
    Regime,
    RegimeError,
    critical_overlap,
    efficiency_profile,
    induced_efficiencies,
    success_probability,
)
from qchange.certify import (
    ConstructionError,
    DualWitness,
    analytic_witness,
    certify,
    certify_grid,
    check_dual,
    check_primal,
    delta_k,
    kernel_projector,
    kernel_reduce,
    minor_ratios,
    numeric_oracle,
    reduced_matrix,
)
from qchange.model import DomainError, ProblemInstance, build_gram


def test_check_primal_optimal_profile_touches_cone():
    inst = ProblemInstance(3, 0.5)
    point = check_primal(build_gram(inst), induced_efficiencies(inst))
    assert point.feasible
    assert abs(point.min_eig) <= 1e-10  # complementarity: the constraint is active


def test_check_primal_verdicts():
    g0 = build_gram(ProblemInstance(3, 0.0))
    assert check_primal(g0, np.ones(3)).feasible
    g5 = build_gram(ProblemInstance(3, 0.5))
    assert not check_primal(g5, np.ones(3)).feasible


def test_check_dual_examples():
    point = check_dual(build_gram(ProblemInstance(2, 0.5)),
                       DualWitness(np.array([1.0, -1.0]), 0.0, False, 0.0))
    assert point.feasible
    assert point.value == pytest.approx(0.5, abs=1e-15)
    u = np.array([1.0, -1.0, 1.0, -1.0, 1.0])
    assert check_dual(build_gram(ProblemInstance(5, 0.0)),
                      DualWitness(u, 0.0, False, 0.0)).value == pytest.approx(1.0)


def test_region_two_witness_value_matches_modified_profile():
    inst = ProblemInstance(20, 0.7)
    u = analytic_witness(inst)
    assert u[1] ** 2 > 1.0 and u[18] ** 2 > 1.0  # scaled entries exceed the bound
    point = check_dual(build_gram(inst), u)
    assert point.feasible
    assert point.min_square >= 1.0 - 1e-12
    assert point.value == pytest.approx(success_probability(inst).value, abs=1e-12)


def test_small_chain_witness():
    # three hypotheses use a dedicated witness above the critical overlap
    inst = ProblemInstance(3, 0.75)
    u = analytic_witness(inst)
    assert np.allclose(u, [1.0, -1.5, 1.0])
    point = check_dual(build_gram(inst), u)
    assert point.feasible
    assert point.value == pytest.approx(2.0 * (1.0 - 0.75 ** 2) / 3.0, abs=1e-12)


def test_certify_examples():
    cert = certify(ProblemInstance(15, 0.5))
    assert cert.certified and cert.regime is Regime.REGION_I
    assert abs(cert.gap) <= 1e-12
    cert2 = certify(ProblemInstance(20, 0.7))
    assert cert2.certified and cert2.regime is Regime.REGION_II
    cert0 = certify(ProblemInstance(2, 0.0))
    assert cert0.certified and cert0.primal.value == pytest.approx(1.0)
    with pytest.raises(DegenerateOverlapError):
        certify(ProblemInstance(5, 1.0))


def test_certify_random_instances():
    rng = np.random.default_rng(41)
    for _ in range(50):
        n = int(rng.integers(2, 30))
        c = float(rng.random() * 0.99)
        cert = certify(ProblemInstance(n, c))
        assert cert.certified, (n, c, cert.gap)
        assert cert.primal.value == pytest.approx(
            success_probability(ProblemInstance(n, c)).value, abs=1e-12)


def test_certify_to_dict_and_grid():
    d = certify(ProblemInstance(8, 0.4)).to_dict()
    for key in ("n", "c", "regime", "primal_value", "dual_value", "gap",
                "primal_feasible", "dual_feasible", "certified"):
        assert key in d
    certs = certify_grid(6, [0.5, 0.1, 0.9])
    assert [cert.instance.c for cert in certs] == [0.1, 0.5, 0.9]
    assert all(cert.certified for cert in certs)


def test_minor_ratios_positive_below_critical():
    report = minor_ratios(ProblemInstance(5, 0.3))
    assert report.all_positive
    assert np.all(report.ratios[:-1] > 0.0)
    assert report.ratios[-1] == pytest.approx(0.0, abs=1e-15)


def test_minor_ratios_match_direct_determinants():
    rng = np.random.default_rng(53)
    for _ in range(40):
        n = int(rng.integers(2, 13))
        cs = critical_overlap(n)
        hi = 0.99 if cs.degenerate else cs.value
        c = float(rng.random() * hi)
        inst = ProblemInstance(n, c)
        report = minor_ratios(inst)
        a = build_gram(inst).entries - np.diag(induced_efficiencies(inst).gammas)
        direct = np.array([np.linalg.det(a[:k, :k]) for k in range(1, n + 1)])
        # the full determinant vanishes structurally; compare it absolutely
        rel = np.abs(report.minors[:-1] - direct[:-1]) / np.abs(direct[:-1])
        assert np.all(rel < 1e-8), (n, c)
        assert abs(direct[-1]) <= 1e-10 * max(1.0, abs(direct[0]))


def test_minor_ratio_vanishes_at_critical_overlap():
    cs = critical_overlap(5).value
    report = minor_ratios(ProblemInstance(5, cs - 1e-9))
    assert report.all_positive
    assert 0.0 < report.ratios[0] < 1e-8  # the leading factor collapses at c*


def test_minor_ratios_straddle_critical():
    for n in (5, 8, 13):
        cs = critical_overlap(n).value
        assert minor_ratios(ProblemInstance(n, cs - 1e-6)).all_positive
        assert not minor_ratios(ProblemInstance(n, cs + 1e-3)).all_positive


def test_delta_k_values_and_symmetry():
    inst = ProblemInstance(6, 0.4)
    values = [delta_k(inst, k) for k in range(6)]
    assert values == pytest.approx(
        [0.545664, 0.0, 0.18816, 0.18816, 0.0, 0.545664], abs=1e-12)
    assert delta_k(inst, 2) == pytest.approx(delta_k(inst, 3), abs=1e-15)
    assert delta_k(ProblemInstance(7, 0.5), 2) >= 0.0
    rng = np.random.default_rng(59)
    for _ in range(30):
        n = int(rng.integers(3, 20))
        c = float(rng.random() * 0.99)
        other = ProblemInstance(n, c)
        for k in range(n):
            v = delta_k(other, k)
            assert v >= -1e-15
            assert v == pytest.approx(delta_k(other, n - 1 - k), abs=1e-12)
    with pytest.raises(IndexError):
        delta_k(inst, 6)


def test_kernel_reduce_residuals_and_minors():
    report = kernel_reduce(ProblemInstance(20, 0.7))
    assert report.kernel_residual <= 1e-9
    assert report.all_positive
    rep8 = kernel_reduce(ProblemInstance(8, 0.8))
    assert np.all(rep8.minors[:-1] > 0.0)
    assert rep8.minors[-1] == 0.0
    with pytest.raises(RegimeError):
        kernel_reduce(ProblemInstance(8, 0.2))


def test_kernel_reduce_matches_direct_minors():
    rng = np.random.default_rng(61)
    for _ in range(30):
        n = int(rng.integers(5, 13))
        cs = critical_overlap(n).value
        c = float(cs + (0.99 - cs) * rng.random())
        inst = ProblemInstance(n, c)
        report = kernel_reduce(inst)
        b = reduced_matrix(inst)
        direct = np.array([np.linalg.det(b[:k, :k]) for k in range(1, n - 1)])
        closed = report.minors
        scale = np.maximum(np.abs(direct), 1e-300)
        # the structural zero at the end is checked absolutely
        assert np.all(np.abs(closed[:-1] - direct[:-1]) / scale[:-1] < 1e-6), (n, c)
        assert abs(direct[-1]) <= 1e-9 * max(1.0, abs(direct[0]))


def test_kernel_projector_shapes():
    p = kernel_projector(5, 0.8)
    assert p.shape == (3, 5)
    assert np.allclose(p[0], [0.8, 1.0, 0.0, 0.0, 0.0])
    assert np.allclose(p[-1], [0.0, 0.0, 0.0, 1.0, 0.8])
    # three hypotheses: the reduction degenerates to a single direction
    assert kernel_projector(3, 0.8).shape == (1, 3)
    rep3 = kernel_reduce(ProblemInstance(3, 0.8))
    assert rep3.minors[0] == pytest.approx((1 + 0.8 ** 2) ** 2, abs=1e-12)
    assert rep3.all_positive


def test_numeric_oracle_small_instances():
    assert numeric_oracle(ProblemInstance(2, 0.5), resolution=1e-3) == pytest.approx(
        success_probability(ProblemInstance(2, 0.5)).value, abs=2e-3)
    with pytest.raises(DomainError):
        numeric_oracle(ProblemInstance(9, 0.5))
    with pytest.raises(DomainError):
        numeric_oracle(ProblemInstance(4, 0.5), resolution=0.0)
