import math

import numpy as np
import pytest
import sympy as sp
from dataclasses import replace
from hypothesis import given, settings
from hypothesis import strategies as st

from heisenspec.group import (Field, GroupPoint, LatticeDomain, SupportOverflowError, dilate,
                              group_convolve, group_inverse, group_mul, heisenberg_laplacian_apply,
                              radial_laplacian_apply)
from heisenspec.heat import gaussian_test_field
from heisenspec.nonlocal_ import apply_rescaled_operator, build_kernel_matrix
from heisenspec.radial import RadialProfile
from heisenspec.special import phi_radial

coord = st.floats(-3, 3, allow_nan=False)


def points(n=1):
    return st.builds(lambda x, y, s: GroupPoint(x, y, s),
                     st.lists(coord, min_size=n, max_size=n), st.lists(coord, min_size=n, max_size=n),
                     coord)


def close(p, q, tol=1e-12):
    return (np.allclose(p.x, q.x, atol=tol) and np.allclose(p.y, q.y, atol=tol)
            and math.isclose(p.s, q.s, abs_tol=tol))


def test_product_of_unit_vectors():
    p = GroupPoint([1.0], [0.0], 0.0) * GroupPoint([0.0], [1.0], 0.0)
    assert p.as_tuple() == (1.0, 1.0, -0.5)


@given(points(), points(), points())
def test_associativity(a, b, c):
    assert close(group_mul(group_mul(a, b), c), group_mul(a, group_mul(b, c)), 1e-10)


@given(points(2))
def test_inverse_and_identity(a):
    e = GroupPoint.identity(2)
    assert close(group_mul(a, group_inverse(a)), e, 0)
    assert close(group_mul(group_inverse(a), a), e, 0)
    assert close(group_mul(a, e), a, 0)


@given(points(), points(), st.floats(0.1, 10))
def test_dilation_is_automorphism(a, b, r):
    assert close(dilate(r, group_mul(a, b)), group_mul(dilate(r, a), dilate(r, b)), 1e-9)


@given(points(), points())
def test_commutator_is_central(a, b):
    ab, ba = group_mul(a, b), group_mul(b, a)
    assert np.allclose(ab.x, ba.x) and np.allclose(ab.y, ba.y)
    im = float(np.sum(a.y * b.x - a.x * b.y))
    assert ab.s - ba.s == pytest.approx(im, abs=1e-10)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        group_mul(GroupPoint.identity(1), GroupPoint.identity(2))
    with pytest.raises(ValueError):
        dilate(0.0, GroupPoint.identity(1))


def test_lattice_box_layout():
    lat = LatticeDomain.box(1, 0.5, 0.25, 1.0, 0.5, 2, 3)
    assert lat.shape == (9, 9, 11)
    assert lat.n_omega == 5 * 5 * 5
    X, Y, S = lat.coords()
    # s runs fastest
    assert S[1] - S[0] == pytest.approx(0.25) and X[1, 0] == X[0, 0]
    om = lat.omega_nodes
    assert np.abs(X[om]).max() == pytest.approx(1.0) and np.abs(S[om]).max() == pytest.approx(0.5)


def test_field_shapes():
    lat = LatticeDomain.box(1, 0.5, 0.5, 0.5, 0.5, 1, 1)
    with pytest.raises(ValueError):
        Field(lat, np.zeros(3))
    f = Field(lat, np.arange(lat.n_omega, dtype=float), on="omega")
    full = f.full_values(exterior=-1.0)
    assert np.array_equal(full[lat.mask], f.values) and np.all(full[~lat.mask] == -1.0)


def brute_force_convolution(kernel, lattice, u):
    """Double loop over Omega rows and every lattice node, in node order."""
    vol = lattice.cell_volume
    out = np.zeros(lattice.n_omega)
    for i, p in enumerate(lattice.omega_nodes):
        P = lattice.point(p)
        acc = 0.0
        for q in range(lattice.size):
            w = group_mul(P, group_inverse(lattice.point(q)))
            acc = acc + float(kernel.evaluate(w.x, w.y, w.s)) * vol * u[q]
        out[i] = acc
    return out


def small_lattice(kernel):
    return LatticeDomain.for_kernel(1, 0.5, 0.5, 0.5, 0.5, kernel.radius_z, kernel.radius_s)


def test_group_convolve_matches_double_loop_bitwise(unit_kernel, rng):
    lat = small_lattice(unit_kernel)
    u = rng.standard_normal(lat.size)
    fast = group_convolve(Field(lat, u), unit_kernel).values
    slow = brute_force_convolution(unit_kernel, lat, u)
    assert np.array_equal(fast, slow)


def test_group_convolve_of_constant_is_discrete_mass(unit_kernel):
    lat = small_lattice(unit_kernel)
    out = group_convolve(Field(lat, np.ones(lat.size)), unit_kernel).values
    # the lattice sum of a smooth bump is close to its integral
    assert np.allclose(out, 1.0, atol=2e-2)


def test_support_overflow(unit_kernel):
    lat = LatticeDomain.box(1, 0.5, 0.5, 0.5, 0.5, 1, 1)
    with pytest.raises(SupportOverflowError):
        group_convolve(Field(lat, np.ones(lat.size)), unit_kernel)


def test_kernel_matrix_symmetry_and_negative_control(unit_kernel):
    lat = LatticeDomain.for_kernel(1, 0.5, 0.5, 1.0, 1.0, unit_kernel.radius_z, unit_kernel.radius_s)
    K = build_kernel_matrix(unit_kernel, lat)
    assert K.asymmetry == 0.0
    shifted = replace(unit_kernel, shift=0.3)
    assert not shifted.is_s_symmetric
    bad = build_kernel_matrix(shifted, LatticeDomain.for_kernel(
        1, 0.5, 0.5, 1.0, 1.0, unit_kernel.radius_z, unit_kernel.radius_s + 0.3))
    assert bad.asymmetry > 1e-3 * bad.max_entry


def test_flipped_symplectic_sign_reverses_drift(unit_kernel):
    # L(x s) = -y; with the sign of Im flipped the same sum converges to +y
    from heisenspec.heat import eps_lattice

    eps = 0.2
    lat = eps_lattice(unit_kernel, eps, 0.4, 0.2)
    X, Y, S = lat.coords()
    f = lat.field(lambda X, Y, S: X[:, 0] * S)
    y = Y[lat.mask, 0]
    good = apply_rescaled_operator(unit_kernel, eps, f).values
    flipped = apply_rescaled_operator(unit_kernel, eps, f, im_sign=-1.0).values
    assert np.abs(good + y).max() < 2e-3
    assert np.abs(flipped - y).max() < 2e-3


@pytest.mark.parametrize("lam,k", [(0.5, 0), (1.0, 0), (1.0, 1), (2.0, 1), (-1.0, 2), (0.5, 3)])
def test_lattice_laplacian_on_spherical_functions(lam, k):
    hs = [0.1, 0.05, 0.025]
    errs = []
    for h in hs:
        lat = LatticeDomain.box(1, h, h, 0.5, 0.5, 1, 1)
        X, Y, S = lat.coords()
        f = phi_radial(lam, k, 1, np.hypot(X[:, 0], Y[:, 0]), S)
        Lf = heisenberg_laplacian_apply(Field(lat, f)).values
        errs.append(np.abs(Lf + abs(lam) * (2 * k + 1) * f[lat.mask]).max())
    order = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert order >= 1.8


def sympy_L(expr, x, y, s):
    return (sp.diff(expr, x, 2) + sp.diff(expr, y, 2) + (x**2 + y**2) / 4 * sp.diff(expr, s, 2)
            + sp.diff(x * sp.diff(expr, y) - y * sp.diff(expr, x), s))


def test_gaussian_test_field_against_symbolic_L():
    x, y, s = sp.symbols("x y s", real=True)
    a, b, cx, cy = sp.Rational(3, 2), sp.Rational(1, 2), sp.Rational(1, 3), sp.Rational(-1, 5)
    v = sp.exp(-a * ((x - cx) ** 2 + (y - cy) ** 2) - b * s**2)
    Lv = sp.lambdify((x, y, s), sympy_L(v, x, y, s), "numpy")
    _, Lv_num = gaussian_test_field(float(a), float(b), float(cx), float(cy))
    pts = np.random.default_rng(1).uniform(-1, 1, (50, 3))
    X, Y, S = pts[:, :1], pts[:, 1:2], pts[:, 2]
    assert np.allclose(Lv_num(X, Y, S), Lv(X[:, 0], Y[:, 0], S), atol=1e-12)


def test_lattice_laplacian_order_on_rotating_field():
    v, Lv = gaussian_test_field()
    hs = [0.1, 0.05, 0.025]
    errs = []
    for h in hs:
        lat = LatticeDomain.box(1, h, h, 0.5, 0.5, 1, 1)
        errs.append(np.abs(heisenberg_laplacian_apply(lat.field(v)).values - lat.sample(Lv)[lat.mask]).max())
    assert np.polyfit(np.log(hs), np.log(errs), 1)[0] >= 1.8


def test_radial_laplacian_eigenrelation():
    for n in (1, 2):
        errs = []
        for nr in (101, 201):
            f = RadialProfile.from_function(lambda r, s: phi_radial(1.5, 2, n, r, s).real, n,
                                            r_max=4.0, s_max=2.0, n_r=nr, n_s=nr)
            Lf = radial_laplacian_apply(f)
            ref = -1.5 * (4 + n) * f.values[:-1, 1:-1]
            errs.append(np.abs(Lf.values - ref).max())
        assert errs[1] < errs[0] / 3.5


@settings(max_examples=20, deadline=None)
@given(lam=st.floats(0.3, 3.0), k=st.integers(0, 4))
def test_radial_and_lattice_laplacians_agree(lam, k):
    # both discretize L; on a radial function they must agree to O(h^2)
    h = 0.05
    lat = LatticeDomain.box(1, h, h, 0.3, 0.3, 1, 1)
    X, Y, S = lat.coords()
    f = phi_radial(lam, k, 1, np.hypot(X[:, 0], Y[:, 0]), S).real
    Lf = heisenberg_laplacian_apply(Field(lat, f)).values
    ref = -lam * (2 * k + 1) * f[lat.mask]
    assert np.abs(Lf - ref).max() <= 0.05 * lam**2 * (2 * k + 1) ** 2 * h**2 * 40
