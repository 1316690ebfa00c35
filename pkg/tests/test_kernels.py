import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from heisenspec.kernels import (ball_bump_moments, build_kernel, closed_form_radius_s,
                                read_kernel_config, rescaled_kernel, write_kernel_config)


def moments_by_cubature(J):
    """mass and second moments of an n = 1 kernel by 2D quadrature in (r, s)."""
    f = lambda s, r, p: J.evaluate_radial(r, s) * r * p  # noqa: E731
    kw = dict(epsabs=0, epsrel=1e-11)
    rz, rs = J.radius_z, J.radius_s
    mass = 2 * math.pi * integrate.dblquad(lambda s, r: f(s, r, 1.0), 0, rz, -rs, rs, **kw)[0]
    x2 = math.pi * integrate.dblquad(lambda s, r: f(s, r, r * r), 0, rz, -rs, rs, **kw)[0]
    s2 = 2 * math.pi * integrate.dblquad(lambda s, r: f(s, r, 1.0) * s * s, 0, rz, -rs, rs, **kw)[0]
    return mass, x2, s2


def test_unit_kernel_moments(unit_kernel):
    mass, x2, s2 = moments_by_cubature(unit_kernel)
    assert mass == pytest.approx(1.0, rel=1e-9)
    assert x2 == pytest.approx(s2, rel=1e-9)
    assert x2 == pytest.approx(unit_kernel.c1, rel=1e-9)
    # R_z = 2: <x_1^2> = R_z^2 / 8 for the n = 1 ball bump
    assert unit_kernel.c1 == pytest.approx(0.5, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_radius_s_matches_closed_form(n):
    J = build_kernel(n, radius_z=1.5)
    assert J.radius_s == pytest.approx(closed_form_radius_s(n, 1.5), rel=1e-12)
    _, mx, ms = ball_bump_moments(n, J.radius_z, J.radius_s)
    assert mx == pytest.approx(ms, rel=1e-12)


@settings(max_examples=15, deadline=None)
@given(eps=st.floats(0.05, 1.0))
def test_rescaled_kernel_moments(unit_kernel, eps):
    Je = rescaled_kernel(unit_kernel, eps)
    mass, x2, s2 = moments_by_cubature(Je)
    assert mass == pytest.approx(2 / unit_kernel.c1, rel=1e-8)
    assert x2 == pytest.approx(2 * eps**2, rel=1e-8)
    assert s2 == pytest.approx(2 * eps**4, rel=1e-8)
    assert Je.radius_z == pytest.approx(eps * unit_kernel.radius_z)
    assert Je.radius_s == pytest.approx(eps**2 * unit_kernel.radius_s)


def test_rescaling_twice_is_rejected(unit_kernel):
    with pytest.raises(ValueError):
        rescaled_kernel(rescaled_kernel(unit_kernel, 0.5), 0.5)
    with pytest.raises(ValueError):
        rescaled_kernel(unit_kernel, 0.0)


def test_kernel_shape_is_even_and_compact(unit_kernel):
    x = np.array([[0.3], [1.99], [2.01]])
    y = np.zeros_like(x)
    s = np.array([0.4, 0.1, 0.0])
    vals = unit_kernel.evaluate(x, y, s)
    assert vals[0] > 0 and vals[1] > 0 and vals[2] == 0
    assert np.array_equal(unit_kernel.evaluate(-x, y, -s), vals)
    assert unit_kernel.j00 == pytest.approx(unit_kernel.sup)
    assert unit_kernel.is_s_symmetric


def test_product_bump_only_for_n1():
    assert build_kernel(1, "product_bump").radius_s == build_kernel(1).radius_s
    with pytest.raises(ValueError):
        build_kernel(2, "product_bump")
    with pytest.raises(ValueError):
        build_kernel(1, "triangle")


def test_kernel_config_roundtrip(tmp_path, unit_kernel):
    for J in (unit_kernel, rescaled_kernel(unit_kernel, 0.3)):
        path = tmp_path / "kernel.cfg"
        write_kernel_config(J, path)
        assert read_kernel_config(path) == J
