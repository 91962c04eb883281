import math

import numpy as np
import pytest
from hypothesis import given

from blochprop import FieldVector, RelaxationRates, build_gamma, gamma_from_params, gamma_squared_couplings, partition
from blochprop.core import LEVI_CIVITA
from blochprop.errors import NegativeRateError, NonFiniteInputError

from conftest import field_st, rates_st


def test_gamma_layout():
    g = gamma_from_params([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
    expected = np.array([[4.0, 3.0, -2.0], [-3.0, 5.0, 1.0], [2.0, -1.0, 6.0]])
    np.testing.assert_array_equal(g.m, expected)
    assert not g.m.flags.writeable


def test_minus_gamma_is_cross_product_without_relaxation():
    w = np.array([0.4, -1.3, 2.2])
    g = gamma_from_params(w, [0.0, 0.0, 0.0])
    v = np.array([1.0, 2.0, -0.5])
    np.testing.assert_allclose(-g.m @ v, np.cross(w, v), atol=1e-15)


def test_field_derived_quantities():
    f = FieldVector(3.0, 4.0, 12.0)
    assert f.omega12 == 5.0
    assert f.omegaE == 13.0
    assert f.phase == pytest.approx(math.atan2(4.0, 3.0))


def test_rates_aliases():
    r = RelaxationRates(2.0, 2.0, 0.5)
    assert r.T1 == 2.0 and r.T2 == 0.5
    assert r.r_delta == pytest.approx(0.5)
    with pytest.raises(ValueError):
        RelaxationRates(1.0, 2.0, 0.5).r_delta


@pytest.mark.parametrize("bad", [(-1.0, 1.0, 1.0), (1.0, 1.0, -1e-9)])
def test_negative_rates_rejected(bad):
    with pytest.raises(NegativeRateError):
        RelaxationRates(*bad)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_rejected(bad):
    with pytest.raises(NonFiniteInputError):
        FieldVector(0.0, bad, 1.0)
    with pytest.raises(NonFiniteInputError):
        RelaxationRates(bad, 1.0, 1.0)


@given(field_st, rates_st)
def test_partition_is_trace_free_and_reconstructs(w, r):
    g = gamma_from_params(w, r)
    p = partition(g)
    assert abs(np.trace(p.gamma_p)) <= 1e-13 * max(r)
    np.testing.assert_allclose(p.reconstruct(), g.m, atol=1e-13 * max(max(r), 1.0))
    np.testing.assert_array_equal(p.omega, np.asarray(w))
    assert p.rbar == pytest.approx(sum(r) / 3.0)


@given(field_st, rates_st)
def test_gamma_squared_and_couplings(w, r):
    g = gamma_from_params(w, r)
    c = gamma_squared_couplings(g)
    np.testing.assert_allclose(c.gamma_sq, g.m @ g.m, rtol=1e-12, atol=1e-12 * (max(map(abs, w + r)) + 1) ** 2)
    np.testing.assert_array_equal(np.diag(c.kappa), 0.0)
    np.testing.assert_allclose(c.sigma, -c.sigma.T)
    # kappa is symmetric and sigma antisymmetric
    np.testing.assert_allclose(c.kappa, c.kappa.T)
    # rows of the spring network balance against the diagonal of Gamma^2
    np.testing.assert_allclose(c.k_diag + c.k.sum(axis=1), -np.diag(c.gamma_sq))


def test_sigma_matches_levi_civita_form():
    w = np.array([0.3, 1.7, -2.0])
    r = np.array([1.0, 2.0, 5.0])
    c = gamma_squared_couplings(gamma_from_params(w, r))
    expected = np.einsum("ijk,k->ij", LEVI_CIVITA, w) * (r[:, None] + r[None, :])
    np.testing.assert_allclose(c.sigma, expected)


def test_build_gamma_from_types():
    g = build_gamma(FieldVector(0.0, 0.0, 1.0), RelaxationRates(1.0, 1.0, 1.0))
    assert g.trace == 3.0
    assert g.scale == 1.0
