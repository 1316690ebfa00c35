import math

import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings
from hypothesis import strategies as st

from heisenspec.group import GroupPoint
from heisenspec.special import (SphericalIndex, bessel_j, eta, laguerre_function,
                                laguerre_normalized, phi, phi_radial)


@pytest.mark.parametrize("k", [0, 1, 2, 5, 17, 40])
@pytest.mark.parametrize("alpha", [0, 1, 2])
def test_laguerre_normalized_matches_scipy(k, alpha):
    x = np.linspace(0, 30, 61)
    ref = sc.eval_genlaguerre(k, alpha, x) / sc.binom(k + alpha, k)
    got = laguerre_normalized(k, alpha, x)
    assert np.allclose(got, ref, rtol=1e-10, atol=1e-10 * np.abs(ref).max())


def test_laguerre_normalized_is_one_at_origin():
    for k in range(60):
        assert laguerre_normalized(k, 1, 0.0) == 1.0


@given(k=st.integers(0, 30), x=st.floats(0, 60))
def test_laguerre_function_matches_polynomial_times_envelope(k, x):
    ref = sc.eval_genlaguerre(k, 0, x) * math.exp(-x / 2)
    # |psi_k| <= 1 for alpha = 0, so compare absolutely
    assert abs(laguerre_function(k, 0, x) - ref) <= 1e-12


def test_laguerre_function_survives_large_degree():
    # |psi_k| <= 1 for alpha = 0; the plain polynomial overflows here
    vals = laguerre_function(400, 0, np.linspace(0, 2000, 201))
    assert np.all(np.isfinite(vals))
    assert np.abs(vals).max() <= 1.0 + 1e-9


@pytest.mark.parametrize("nu", [0, 1, 2, 5])
def test_bessel_matches_scipy(nu):
    x = np.concatenate([np.linspace(0, 12, 49), np.linspace(12.01, 150, 97)])
    assert np.allclose(bessel_j(nu, x), sc.jv(nu, x), rtol=0, atol=1e-13)


def test_bessel_parity():
    x = np.linspace(0.1, 20, 23)
    assert np.allclose(bessel_j(3, -x), -bessel_j(3, x), atol=1e-15)
    assert np.allclose(bessel_j(2, -x), bessel_j(2, x), atol=1e-15)


def test_spherical_index_validation():
    assert SphericalIndex.laguerre(-2.0, 3).eigenvalue(1) == 14.0
    assert SphericalIndex.bessel(1.5).eigenvalue(2) == 2.25
    with pytest.raises(ValueError):
        SphericalIndex.laguerre(0.0, 1)
    with pytest.raises(ValueError):
        SphericalIndex.laguerre(1.0, -1)
    with pytest.raises(ValueError):
        SphericalIndex.bessel(-1.0)


def test_phi_is_one_at_identity_and_bounded():
    p0 = GroupPoint.identity(2)
    for lam, k in [(0.3, 0), (-2.0, 4), (5.0, 11)]:
        assert phi(lam, k, 2, p0) == 1.0
    r = np.linspace(0, 10, 101)[:, None]
    s = np.linspace(-5, 5, 41)[None, :]
    assert np.abs(phi_radial(1.3, 7, 1, r, s)).max() <= 1.0 + 1e-12


def test_phi_conjugation_in_lambda():
    r, s = 0.7, 1.9
    assert phi_radial(-2.0, 3, 1, r, s) == pytest.approx(np.conj(phi_radial(2.0, 3, 1, r, s)))


def test_eta_limit_of_phi():
    # phi_{lam,k} -> eta_r as lam -> 0 with |lam|(2k+n) -> r^2
    n, r0 = 1, 1.5
    p = GroupPoint([0.8], [-0.3], 0.0)
    lam = 1e-4
    k = int(round((r0**2 / lam - n) / 2))
    r_eff = math.sqrt(lam * (2 * k + n))
    assert phi(lam, k, n, p).real == pytest.approx(eta(r_eff, n, p), abs=1e-4)


@settings(max_examples=30)
@given(r=st.floats(0, 5), x=st.floats(-3, 3), y=st.floats(-3, 3))
def test_eta_n2_closed_form(r, x, y):
    # n = 2: eta_r = 2 J_1(r|z|) / (r|z|)
    p = GroupPoint([x, 0.0], [y, 0.0], 0.0)
    arg = r * math.hypot(x, y)
    # series below 1e-8: j1 of a subnormal argument has too few bits
    ref = 1 - arg * arg / 8 if arg < 1e-8 else 2 * sc.j1(arg) / arg
    assert eta(r, 2, p) == pytest.approx(ref, abs=1e-12)


def test_phi_rejects_lambda_zero():
    with pytest.raises(ValueError):
        phi_radial(0.0, 1, 1, 1.0, 0.0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_eta_at_tiny_arguments(n):
    # nu!(2/x)^nu J_nu(x) -> 1 without underflow, even for subnormal r|z|
    p = GroupPoint([1.0] + [0.0] * (n - 1), [0.0] * n, 0.0)
    for r in (5e-324, 1e-200, 1e-9):
        assert eta(r, n, p) == pytest.approx(1.0, abs=1e-15)
