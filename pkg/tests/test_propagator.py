import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from blochprop import CanonicalCoeffs, RootClass, analyse, ch_coefficients, gamma_from_params, partition, propagator, solve_roots
from blochprop.errors import BranchMismatchError, NegativeTimeError, ZeroRootInDoubleBranchError
from blochprop.oracle import OracleConfig, expm_reference
from blochprop.propagator import (
    adjugate_coeffs,
    complex_residue_sum,
    propagate_partitioned,
    propagator_distinct,
    propagator_double,
    propagator_triple,
    u1_vector,
    u2_vector,
    w1_matrix,
    w2_matrix,
)

from conftest import field_st, random_system, rates_st, rel_max

RATES = [4.0, 4.0, 1.0]  # r_delta = 1
S3 = math.sqrt(3.0)


def golden_rotating(t):
    k = S3 / 2
    return math.exp(t / 2) * np.array([
        [math.exp(-1.5 * t), 0, 0],
        [0, -2 * math.sin(k * t - math.pi / 6), -2 * math.sin(k * t)],
        [0, 2 * math.sin(k * t), 2 * math.sin(k * t + math.pi / 6)],
    ])


def golden_hyperbolic(t):
    e = math.exp(t)
    return np.array([[math.exp(-t), 0, 0], [0, 2 - e, math.sqrt(2) * (1 - e)], [0, -math.sqrt(2) * (1 - e), 2 * e - 1]])


def golden_relaxation(t):
    return np.diag([math.exp(-t), math.exp(-t), math.exp(2 * t)])


def golden_double(t):
    w1 = 1.5
    return math.exp(t / 2) * np.array([[math.exp(-1.5 * t), 0, 0], [0, 1 - w1 * t, -w1 * t], [0, w1 * t, 1 + w1 * t]])


GOLDEN = [
    ([S3, 0, 0], golden_rotating, RootClass.UNDERDAMPED),
    ([math.sqrt(2), 0, 0], golden_hyperbolic, RootClass.OVERDAMPED),
    ([0, 0, 0], golden_relaxation, RootClass.CRITICAL_DOUBLE),
    ([1.5, 0, 0], golden_double, RootClass.CRITICAL_DOUBLE),
]


@pytest.mark.parametrize("field,golden,branch", GOLDEN)
@pytest.mark.parametrize("t", [0.1, 1.0, 3.7])
def test_golden_partitioned_matrices(field, golden, branch, t):
    prop = propagator(gamma_from_params(field, RATES), t)
    assert prop.branch is branch
    np.testing.assert_allclose(prop.partitioned, golden(t), atol=1e-12 * max(1.0, np.abs(golden(t)).max()))


def test_oracle_matches_rotating_golden():
    # the stated 1e-12 match of the rotating example against the series oracle
    g = gamma_from_params([S3, 0, 0], RATES)
    p = partition(g)
    np.testing.assert_allclose(expm_reference(-np.asarray(p.gamma_p), t=0.7), golden_rotating(0.7), atol=1e-12)


def test_zero_time_is_identity():
    for field in ([0, 0, 0], [1, 2, 3], [1.5, 0, 0]):
        prop = propagator(gamma_from_params(field, RATES), 0.0)
        np.testing.assert_array_equal(prop.m, np.eye(3))


@pytest.mark.parametrize("t", [-1e-12, -1.0, math.nan, math.inf])
def test_bad_times_rejected(t):
    with pytest.raises(NegativeTimeError):
        propagator(gamma_from_params([1, 0, 0], RATES), t)


@settings(max_examples=200)
@given(field_st, rates_st, st.floats(0.0, 2.0))
def test_matches_scipy_expm(w, r, t):
    g = gamma_from_params(w, r)
    ref = scipy.linalg.expm(-np.asarray(g.m) * t)
    assert rel_max(propagator(g, t).m, ref) <= 1e-10


@given(field_st, rates_st, st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_semigroup(w, r, t1, t2):
    g = gamma_from_params(w, r)
    lhs = propagator(g, t1).m @ propagator(g, t2).m
    assert rel_max(lhs, propagator(g, t1 + t2).m) <= 1e-10


@given(field_st, rates_st, st.floats(0.0, 2.0))
def test_determinant(w, r, t):
    g = gamma_from_params(w, r)
    expected = math.exp(-g.trace * t)
    assert abs(np.linalg.det(propagator(g, t).m) - expected) <= 1e-10 * max(1.0, expected)


def test_generator_by_central_difference(rng):
    g = random_system(rng)
    t0 = 0.3
    errs = []
    for h in (1e-2, 5e-3, 2.5e-3):
        d = (propagator(g, t0 + h).m - propagator(g, t0 - h).m) / (2 * h)
        errs.append(np.abs(d + np.asarray(g.m) @ propagator(g, t0).m).max())
    # second-order convergence: halving h cuts the error about 4x
    assert errs[1] < errs[0] / 3.5 and errs[2] < errs[1] / 3.5


def test_distinct_form_matches_complex_residue_sum(rng):
    for _ in range(50):
        g = random_system(rng)
        p = partition(g)
        _, sol = analyse(p)
        if not sol.root_class.distinct:
            continue
        t = rng.uniform(0, 2 / max(p.scale, 1e-3))
        real = propagator_distinct(p, sol, t).partitioned
        cplx = complex_residue_sum(p, sol, t)
        assert np.abs(cplx.imag).max() <= 1e-11 * np.abs(real).max()
        assert rel_max(real, cplx.real) <= 1e-11


def test_weight_matrices_reproduce_weights():
    c = CanonicalCoeffs(1.3, -0.4)
    sol = solve_roots(c)
    t = 0.8
    np.testing.assert_allclose(w1_matrix(sol.z1, c.a) @ u1_vector(sol.z1, sol.varpi_sq, t),
                               ch_coefficients(sol, c.a, t), rtol=1e-13)
    d = solve_roots(CanonicalCoeffs(-3.0, -2.0))
    np.testing.assert_allclose(w2_matrix(d.z1) @ u2_vector(d.z1, t), ch_coefficients(d, d.a, t), rtol=1e-13)


def test_b_zero_reduces_to_trig_form():
    # r_delta = 0 gives b = 0 and a = omega_e^2
    w = np.array([0.2, -0.9, 1.4])
    g = gamma_from_params(w, [0.3, 0.3, 0.3])
    p = partition(g)
    we = np.linalg.norm(w)
    t = 1.9
    gp = np.asarray(p.gamma_p) / we
    expected = np.eye(3) - gp * math.sin(we * t) + gp @ gp * (1 - math.cos(we * t))
    np.testing.assert_allclose(propagator(g, t).partitioned, expected, atol=1e-13)


def test_hyperbolic_b_zero_form():
    g = gamma_from_params([math.sqrt(2), 0, 0], RATES)
    p = partition(g)
    mu, t = 1.0, 0.6
    gp = np.asarray(p.gamma_p) / mu
    expected = np.eye(3) - gp * math.sinh(mu * t) + gp @ gp * (math.cosh(mu * t) - 1)
    np.testing.assert_allclose(propagator(g, t).partitioned, expected, atol=1e-13)


def test_branch_functions_reject_wrong_class():
    p = partition(gamma_from_params([1.5, 0, 0], RATES))
    _, dbl = analyse(p)
    assert dbl.root_class is RootClass.CRITICAL_DOUBLE
    with pytest.raises(BranchMismatchError):
        propagator_distinct(p, dbl, 1.0)
    with pytest.raises(BranchMismatchError):
        propagator_triple(p, 1.0, dbl)
    _, und = analyse(partition(gamma_from_params([3, 0, 0], RATES)))
    with pytest.raises(BranchMismatchError):
        propagator_double(p, und, 1.0)
    zero = solve_roots(CanonicalCoeffs(-3.0, -2.0)).__class__(0.0, 0.0, RootClass.CRITICAL_DOUBLE, 0.0, 0.0)
    with pytest.raises(ZeroRootInDoubleBranchError):
        propagator_double(p, zero, 1.0)


def test_triple_root_system():
    # omega_e^2 = 3 rd^2 with omega3^2 = rd^2/3
    w3 = math.sqrt(1 / 3)
    w1 = math.sqrt(3 - 1 / 3)
    g = gamma_from_params([w1, 0, w3], RATES)
    t = 1.4
    prop = propagator(g, t)
    assert prop.branch is RootClass.CRITICAL_TRIPLE
    gp = np.asarray(partition(g).gamma_p)
    np.testing.assert_allclose(gp @ gp @ gp, 0, atol=1e-13)
    expected = np.eye(3) - gp * t + gp @ gp * t * t / 2
    np.testing.assert_allclose(prop.partitioned, expected, atol=1e-12)


def test_near_degenerate_limits_are_continuous():
    # approach the double root at (omega1 = 1.5, rd = 1) from both sides
    t = 2.0
    ref = golden_double(t)
    for eps in (1e-9, -1e-9, 1e-5, -1e-5):
        g = gamma_from_params([1.5 + eps, 0, 0], RATES)
        prop = propagator(g, t)
        exact = scipy.linalg.expm(-np.asarray(partition(g).gamma_p) * t)
        assert rel_max(prop.partitioned, exact) <= 1e-10
        assert np.abs(prop.partitioned - ref).max() <= 10 * abs(eps) * np.abs(ref).max()


def test_long_times_do_not_overflow():
    g = gamma_from_params([3.0, 1.0, -2.0], [50.0, 60.0, 70.0])
    m = propagator(g, 50.0).m
    assert np.all(np.isfinite(m)) and np.abs(m).max() < 1e-300


def test_large_phase_uses_extended_argument():
    g = gamma_from_params([4.0e4, -3.0e4, 5.0e4], [0.02, 0.05, 0.01])
    t = 120.0  # phase ~ 8.5e6 rad
    ref = expm_reference(-np.asarray(g.m), OracleConfig(dps=40), t)
    assert rel_max(propagator(g, t).m, ref) <= 1e-12


def test_degenerate_class_with_visible_splitting_uses_distinct_roots():
    # gamma - 1 = 1e-12 counts as a double root, but the splitting matters at long t
    c = CanonicalCoeffs(-3.0, -2.0 * (1 + 1e-12), 2.0)
    assert solve_roots(c).root_class is RootClass.CRITICAL_DOUBLE
    g = gamma_from_params([0, 0, 0], [4, 4, 1])
    p = partition(g)
    sol = solve_roots(c)
    prop = propagate_partitioned(p, sol, 1e7)
    assert prop.branch is RootClass.UNDERDAMPED


def test_adjugate_polynomial_is_adjugate():
    g = gamma_from_params([0.3, -0.8, 1.1], [2.0, 3.0, 0.5])
    p = partition(g)
    c, _ = analyse(p)
    adj = adjugate_coeffs(p, c.a)
    z = 0.37
    a = z * np.eye(3) + np.asarray(p.gamma_p)
    np.testing.assert_allclose(adj(z) @ a, np.linalg.det(a) * np.eye(3), atol=1e-13)
