from dataclasses import replace

import numpy as np
import pytest
import scipy.linalg

from heisenspec.eigen import (EigenResult, dirichlet_principal, dirichlet_quotient, fit_rate,
                              neumann_gap, pairwise_quotient, verify_decay)
from heisenspec.experiments import closed_form_eigen_checks
from heisenspec.group import LatticeDomain
from heisenspec.nonlocal_ import build_kernel_matrix, solve_dirichlet, solve_neumann


@pytest.fixture(scope="module")
def setup(unit_kernel):
    lat = LatticeDomain.for_kernel(1, 0.5, 0.5, 1.0, 1.0, unit_kernel.radius_z, unit_kernel.radius_s)
    K = build_kernel_matrix(unit_kernel, lat)
    Kom = K.omega_block()
    Kom = Kom.toarray() if hasattr(Kom, "toarray") else np.asarray(Kom)
    return lat, K, 0.5 * (Kom + Kom.T)


@pytest.fixture(scope="module")
def dirichlet(setup):
    return dirichlet_principal(setup[1])


@pytest.fixture(scope="module")
def neumann(setup):
    return neumann_gap(setup[1])


def test_dirichlet_matches_full_spectrum(setup, dirichlet):
    lat, K, Kom = setup
    vals = scipy.linalg.eigvalsh(np.eye(lat.n_omega) - Kom)
    assert dirichlet.value == pytest.approx(vals[0], abs=1e-13)
    assert dirichlet.next_value == pytest.approx(vals[1], abs=1e-12)
    assert dirichlet.residual <= 1e-12
    assert 0 < dirichlet.value < 1


def test_neumann_matches_full_spectrum(setup, neumann):
    lat, K, Kom = setup
    A = np.diag(Kom.sum(axis=1)) - Kom
    vals = scipy.linalg.eigvalsh(A)
    assert abs(vals[0]) < 1e-13
    assert neumann.value == pytest.approx(vals[1], abs=1e-12)
    assert neumann.vector.values.sum() == pytest.approx(0.0, abs=1e-10)


def test_principal_eigenfunction_is_positive(dirichlet, setup):
    v = dirichlet.vector.values
    assert np.all(v > 0)
    assert np.sum(v**2) * setup[0].cell_volume == pytest.approx(1.0, rel=1e-12)


def test_quotient_at_eigenfunction(setup, dirichlet, rng):
    lat, K, _ = setup
    assert dirichlet_quotient(K, dirichlet.vector.values) == pytest.approx(dirichlet.value, abs=1e-13)
    for _ in range(5):
        u = rng.standard_normal(lat.n_omega)
        assert dirichlet_quotient(K, u) >= dirichlet.value - 1e-13


def test_pairwise_quotient_differs_by_row_sum_defect(setup, rng):
    lat, K, Kom = setup
    d = K.dense().sum(axis=1)
    for _ in range(3):
        u = rng.standard_normal(lat.n_omega)
        expected = dirichlet_quotient(K, u) + np.sum(u**2 * (d - 1)) / (u @ u)
        assert pairwise_quotient(K, u) == pytest.approx(expected, abs=1e-12)


def test_closed_forms(unit_kernel):
    for name, computed, exact in closed_form_eigen_checks(unit_kernel, 0.5):
        assert abs(computed - exact) <= 1e-12, name


def test_asymmetric_kernel_rejected(unit_kernel):
    J = replace(unit_kernel, shift=0.3)
    lat = LatticeDomain.for_kernel(1, 0.5, 0.5, 0.5, 0.5, J.radius_z, J.radius_s)
    K = build_kernel_matrix(J, lat)
    with pytest.raises(ValueError):
        dirichlet_principal(K)


def test_eigenfunction_decays_at_lambda1(setup, dirichlet):
    lat, K, _ = setup
    tr = solve_dirichlet(K, lat, dirichlet.vector.values, T=20.0, dt=1.0, scheme="exact_expm")
    rep = verify_decay(tr, dirichlet.value)
    assert abs(rep["rate_ratio"] - 1) <= 1e-6
    assert rep["bound_holds"]


def test_random_data_obeys_decay_bound(setup, dirichlet, neumann, rng):
    lat, K, _ = setup
    u0 = rng.random(lat.n_omega)
    tr = solve_dirichlet(K, lat, u0, T=60.0, dt=1.0, scheme="exact_expm")
    assert verify_decay(tr, dirichlet.value)["bound_holds"]
    tr = solve_neumann(K, lat, u0, T=60.0, dt=1.0, scheme="exact_expm")
    rep = verify_decay(tr, neumann.value, mode="neumann")
    assert rep["bound_holds"]
    assert rep["fitted_rate"] >= neumann.value * (1 - 1e-3)


def test_verify_decay_flags_a_rate_that_is_too_fast(setup, dirichlet, rng):
    lat, K, _ = setup
    tr = solve_dirichlet(K, lat, rng.random(lat.n_omega), T=10.0, dt=1.0, scheme="exact_expm")
    assert not verify_decay(tr, 2 * dirichlet.value)["bound_holds"]


def test_fit_rate_recovers_exponential():
    t = np.linspace(0, 10, 21)
    assert fit_rate(t, 3 * np.exp(-0.7 * t)) == pytest.approx(0.7, rel=1e-12)
    with pytest.raises(ValueError):
        fit_rate(t, np.zeros_like(t))


def test_eigen_csv(tmp_path, dirichlet, setup):
    dirichlet.to_csv(tmp_path / "e.csv")
    rows = (tmp_path / "e.csv").read_text().splitlines()
    assert rows[0] == "value,residual"
    assert float(rows[1].split(",")[0]) == dirichlet.value
    assert rows[2] == "node_id,eigenfunction"
    assert len(rows) == 3 + setup[0].n_omega
    assert isinstance(dirichlet, EigenResult)
