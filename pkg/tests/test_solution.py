import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blochprop import Magnetization, evolve, gamma_from_params, propagator, steady_state, trajectory
from blochprop.errors import NegativeTimeError, NonFiniteInputError, SingularGammaError
from blochprop.oracle import OracleConfig, integrate_path, integrate_reference

from conftest import random_system, rel_max


def bloch_closed_form(w, t1, t2, m0):
    """Steady state for r1 = r2 = 1/t2, r3 = 1/t1 in relaxation-time form."""
    w1, w2, w3 = w
    w12sq = w1 * w1 + w2 * w2
    den = 1 + t1 * t2 * w12sq + t2 * t2 * w3 * w3
    return m0 / den * np.array([t2 * (w1 * w3 * t2 + w2), t2 * (w2 * w3 * t2 - w1), 1 + t2 * t2 * w3 * w3])


def test_no_field_gives_equilibrium():
    m = steady_state(gamma_from_params([0, 0, 0], [0.5, 2.0, 3.0]), 2.5)
    assert (m.mx, m.my, m.mz) == (0.0, 0.0, 2.5)


def test_unit_times_transverse_field():
    # linear solve of Gamma M = (0, 0, m0 r3), done by hand: (m0/2)(1, 0, 1)
    m = steady_state(gamma_from_params([0, 1, 0], [1, 1, 1]), 3.0)
    np.testing.assert_allclose(m.as_array(), [1.5, 0.0, 1.5], atol=1e-15)


def test_matches_bloch_form_without_omega2():
    w = (0.8, 0.0, -1.3)
    t1, t2 = 2.0, 0.4
    m = steady_state(gamma_from_params(w, [1 / t2, 1 / t2, 1 / t1]), 1.7)
    np.testing.assert_allclose(m.as_array(), bloch_closed_form(w, t1, t2, 1.7), rtol=1e-13)


@given(st.tuples(*[st.floats(-100, 100)] * 3), st.floats(0.01, 100), st.floats(0.01, 100), st.floats(-5, 5))
def test_equal_transverse_matches_relaxation_time_form(w, r2, r3, m0):
    m = steady_state(gamma_from_params(w, [r2, r2, r3]), m0)
    ref = bloch_closed_form(w, 1 / r3, 1 / r2, m0)
    assert np.abs(m.as_array() - ref).max() <= 1e-12 * max(np.abs(ref).max(), 1e-300) + 1e-300


def test_fixed_point_residual(rng):
    for _ in range(100):
        g = random_system(rng)
        m = steady_state(g, 1.3).as_array()
        rhs = np.array([0, 0, 1.3 * g.rates.r3])
        scale = np.abs(g.m).max() * np.abs(m).max()
        assert np.abs(np.asarray(g.m) @ m - rhs).max() <= 1e-12 * max(np.abs(rhs).max(), scale)


def test_singular_gamma():
    with pytest.raises(SingularGammaError):
        steady_state(gamma_from_params([1.0, 2.0, 0.5], [0, 0, 0]), 1.0)


def test_fixed_point_is_stationary():
    g = gamma_from_params([1.0, -2.0, 0.3], [0.5, 0.7, 0.2])
    m_inf = steady_state(g, 1.0)
    for t in (0.0, 0.5, 10.0):
        np.testing.assert_allclose(evolve(g, m_inf, 1.0, t).as_array(), m_inf.as_array(), atol=1e-14)


def test_zero_time_returns_initial():
    g = gamma_from_params([1.0, -2.0, 0.3], [0.5, 0.7, 0.2])
    assert evolve(g, (0.1, 0.2, 0.3), 1.0, 0.0) == Magnetization(0.1, 0.2, 0.3)


def test_matches_rk4(rng):
    g = random_system(rng, rate_exp=(-0.5, 0.5), field_exp=(-0.5, 0.5))
    m_init = (0.3, -0.6, 0.2)
    ref = integrate_reference(g, m_init, 1.0, 1.0).as_array()
    got = evolve(g, m_init, 1.0, 1.0).as_array()
    assert rel_max(got, ref) <= 1e-8


def test_split_forms_agree(rng):
    # P (M0 - Minf) + Minf against P M0 + (I - P) Minf
    for _ in range(50):
        g = random_system(rng)
        t = rng.uniform(0, 3 / g.rates.rbar)
        m_init = rng.normal(size=3)
        p = propagator(g, t).m
        m_inf = steady_state(g, 1.0).as_array()
        a = evolve(g, m_init, 1.0, t).as_array()
        b = p @ m_init + (np.eye(3) - p) @ m_inf
        assert np.abs(a - b).max() <= 1e-12 * max(np.abs(m_init).max(), np.abs(m_inf).max())


def test_semigroup_of_states():
    g = gamma_from_params([0.9, 0.4, -1.2], [0.3, 0.6, 0.2])
    m_init = (1.0, 0.0, -0.5)
    mid = evolve(g, m_init, 1.0, 0.7)
    chained = evolve(g, mid, 1.0, 1.6).as_array()
    np.testing.assert_allclose(chained, evolve(g, m_init, 1.0, 2.3).as_array(), atol=1e-8)


def test_trajectory_single_zero_sample():
    g = gamma_from_params([0.9, 0.4, -1.2], [0.3, 0.6, 0.2])
    assert trajectory(g, (1, 2, 3), 1.0, [0.0]) == [(0.0, Magnetization(1.0, 2.0, 3.0))]


def test_trajectory_free_precession_spiral():
    # transverse field, r2 = 400, r3 = 200, start (1, -1, 0)
    g = gamma_from_params([5000, 0, 0], [400, 400, 200])
    times = np.linspace(0, 0.015, 40)
    traj = trajectory(g, (1, -1, 0), 1.0, times)
    ref = integrate_path(g, (1, -1, 0), 1.0, times, OracleConfig(rk4_step=1e-6))
    for (_, m), r in zip(traj, ref):
        assert np.abs(m.as_array() - r.as_array()).max() <= 1e-8
    m_inf = steady_state(g, 1.0).as_array()
    assert np.linalg.norm(traj[-1][1].as_array() - m_inf) < 0.05 * np.linalg.norm(np.array([1, -1, 0]) - m_inf)


def test_envelope_decay():
    g = gamma_from_params([2.0, -1.0, 3.0], [0.4, 0.5, 0.3])
    m_init = np.array([1.0, 1.0, -1.0])
    m_inf = steady_state(g, 1.0).as_array()
    r_min = min(g.rates.as_tuple())
    d0 = np.linalg.norm(m_init - m_inf)
    for t, m in trajectory(g, m_init, 1.0, np.linspace(0, 10 / r_min, 200)):
        assert np.linalg.norm(m.as_array() - m_inf) <= 10 * d0 * math.exp(-r_min * t)


def test_trajectory_rejects_bad_grid():
    g = gamma_from_params([1, 0, 0], [1, 1, 1])
    with pytest.raises(NegativeTimeError):
        trajectory(g, (0, 0, 1), 1.0, [0.0, 1.0, 0.5])
    with pytest.raises(NegativeTimeError):
        trajectory(g, (0, 0, 1), 1.0, [-1.0])


def test_magnetization_must_be_finite():
    with pytest.raises(NonFiniteInputError):
        Magnetization(0.0, math.nan, 1.0)
