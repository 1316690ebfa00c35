"""Acceptance criteria 1-11.

Each test prints one line ``CRITERION <k>: PASS|FAIL <details>`` to the
terminal (past output capture) and then asserts the same outcome.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from heisenspec.config import Config, parse_config_text
from heisenspec.experiments import run_experiment
from heisenspec.group import Field, LatticeDomain, group_convolve, group_inverse, group_mul
from heisenspec.group import heisenberg_laplacian_apply
from heisenspec.kernels import build_kernel
from heisenspec.nonlocal_ import build_kernel_matrix, check_comparison, solve_dirichlet
from heisenspec.special import phi_radial
from heisenspec.transform import convolution_multiplier_check, default_grid


def report(capsys, k, passed, detail):
    with capsys.disabled():
        print(f"\nCRITERION {k}: {'PASS' if passed else 'FAIL'} {detail}")
    assert passed, detail


def run(name, **extra):
    text = f"experiment = {name}\nrun.workers = 2\n" + "".join(f"{k} = {v}\n" for k, v in extra.items())
    start = time.perf_counter()
    res = run_experiment(name, Config(parse_config_text(text)))
    return res, time.perf_counter() - start


def checks(res, prefix=""):
    return {c.name: c for c in res.checks if c.name.startswith(prefix)}


def worst(cs):
    return ", ".join(f"{c.name}={c.value:.3g}" for c in cs.values())


@pytest.fixture(scope="module")
def J():
    return build_kernel(1, "ball_bump", 2.0)


def test_criterion_1_plancherel_roundtrip(capsys):
    res, secs = run("plancherel")
    trip = checks(res, "roundtrip_")
    refine = checks(res, "refinement_")
    err = max(c.value for c in trip.values())
    ratio = max(c.value for c in refine.values())
    ok = len(trip) == 5 and err <= 1e-3 and ratio < 1 and secs <= 60
    report(capsys, 1, ok, f"profiles={len(trip)} max_rel_err={err:.3g} (<= 1e-3) "
                          f"max fine/coarse={ratio:.3g} (< 1) runtime={secs:.1f}s (<= 60)")


def test_criterion_2_laplacian_eigenrelation(capsys):
    pairs = [(0.5, 0), (1.0, 0), (1.0, 1), (2.0, 1), (-1.0, 2), (0.5, 3)]
    hs = [0.1, 0.05, 0.025]
    start = time.perf_counter()
    orders = []
    for lam, k in pairs:
        errs = []
        for h in hs:
            lat = LatticeDomain.box(1, h, h, 0.5, 0.5, 1, 1)
            X, Y, S = lat.coords()
            f = phi_radial(lam, k, 1, np.hypot(X[:, 0], Y[:, 0]), S)
            Lf = heisenberg_laplacian_apply(Field(lat, f)).values
            errs.append(np.abs(Lf + abs(lam) * (2 * k + 1) * f[lat.mask]).max())
        orders.append(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    secs = time.perf_counter() - start
    ok = min(orders) >= 1.8 and secs <= 30
    report(capsys, 2, ok, f"pairs={len(pairs)} min_order={min(orders):.3f} (>= 1.8) runtime={secs:.1f}s (<= 30)")


def test_criterion_3_sup_decay(capsys):
    res, secs = run("cauchy-decay")
    c = checks(res)
    slope, gap = c["sup_slope"], c["gap_decreasing"]
    ok = abs(slope.value + 2) <= 0.1 and gap.value < 0 and secs <= 120
    report(capsys, 3, ok, f"sup slope={slope.value:.4f} (-2 +- 0.1) "
                          f"t^2 gap max step={gap.value:.3g} (< 0) runtime={secs:.1f}s (<= 120)")


def test_criterion_4_l4_decay(capsys):
    # unattainable as stated: the L^4 norm decays at the dilation rate -1.5
    res, _ = run("lp-decay")
    c = checks(res)["lp_slope"]
    ok = abs(c.value + 1) <= 0.15
    report(capsys, 4, ok, f"L4 slope={c.value:.4f} (-1 +- 0.15); "
                          f"dilation rate {res.notes['dilation_exponent']:g}")


def test_criterion_5_profile(capsys):
    res, _ = run("profile")
    c = checks(res)["profile_decreasing"]
    report(capsys, 5, c.value < 0, f"max successive change of max|t^2 u(delta_t) - G|={c.value:.3g} (< 0)")


def test_criterion_6_dirichlet_decay(capsys):
    res, _ = run("dirichlet-decay")
    c = checks(res)
    rate = c["phi1_rate"]
    bounds = {k: v for k, v in c.items() if k.endswith("_bound")}
    tails = {k: v for k, v in c.items() if k.endswith("_tail_rate")}
    ok = (rate.value <= 1e-6 and all(b.value <= 1 + 1e-6 for b in bounds.values())
          and all(t.value <= 0.02 for t in tails.values()) and len(bounds) > 0)
    report(capsys, 6, ok, f"|rate-lambda1|={rate.value:.3g} (<= 1e-6) "
                          f"max bound ratio={max(b.value for b in bounds.values()):.10f} (<= 1+1e-6) "
                          f"max tail deviation={max(t.value for t in tails.values()):.3g} (<= 0.02)")


def test_criterion_7_neumann_and_closed_forms(capsys):
    res, _ = run("neumann-mass")
    c = checks(res)
    drift = max(v.value for k, v in c.items() if k.endswith("_drift"))
    rate = max(v.value for k, v in c.items() if k.endswith("_rate"))
    eig, _ = run("eigen")
    closed = max(v.value for k, v in checks(eig).items() if k.endswith(("_1x1", "_2x2")))
    ok = drift <= 1e-10 and rate <= 0.02 and closed <= 1e-12
    report(capsys, 7, ok, f"mass drift={drift:.3g} (<= 1e-10) |rate/beta1-1|={rate:.3g} (<= 0.02) "
                          f"closed forms={closed:.3g} (<= 1e-12)")


def test_criterion_8_consistency(capsys):
    res, _ = run("consistency")
    c = checks(res)
    exact = max(c[f"exact_{k}"].value for k in ("one", "x", "s", "x2"))
    order = c["gaussian_order"].value
    ok = exact <= 1e-3 and order >= 0.5 and c["gaussian_decreasing"].value < 0
    report(capsys, 8, ok, f"exact fields max err={exact:.3g} (<= 1e-3) gaussian order={order:.3f} (>= 0.5)")


def test_criterion_9_eps_convergence(capsys):
    res, secs = run("eps-convergence")
    c = checks(res)
    nodes = [int(v) for s, k, v in res.rows if s == "omega_nodes"]
    ok = c["order"].value >= 0.5 and c["barrier"].value <= 1 and secs <= 300
    report(capsys, 9, ok, f"order={c['order'].value:.3f} (>= 0.5) worst error/barrier={c['barrier'].value:.3g} "
                          f"(<= 1) omega nodes={nodes} runtime={secs:.1f}s (<= 300)")


def test_criterion_10_comparison_and_picard(capsys, J):
    lat = LatticeDomain.for_kernel(1, 0.25, 0.25, 0.5, 0.5, J.radius_z, J.radius_s)
    K = build_kernel_matrix(J, lat)
    rng = np.random.default_rng(7)
    low = np.inf
    for _ in range(100):
        w0 = rng.standard_normal(lat.n_omega)
        u0 = w0 + rng.random(lat.n_omega)
        c, gap = rng.standard_normal(), abs(rng.standard_normal())
        g_lo = (lambda X, Y, S, t, c=c: c * (1 + 0.5 * np.sin(X[:, 0] + 2 * S)))
        g_hi = (lambda X, Y, S, t, c=c, gap=gap: c * (1 + 0.5 * np.sin(X[:, 0] + 2 * S)) + gap)
        sup = solve_dirichlet(K, lat, u0, g_hi, T=2.0, dt=0.1, scheme="rk4", save_every=2)
        sub = solve_dirichlet(K, lat, w0, g_lo, T=2.0, dt=0.1, scheme="rk4", save_every=2)
        low = min(low, check_comparison(sup, sub)["min_difference"])
    u0 = rng.random(lat.n_omega)
    g = lambda X, Y, S, t: 0.7 * (1 + 0.5 * np.sin(X[:, 0] + 2 * S))  # noqa: E731
    pic = solve_dirichlet(J, lat, u0, g, T=1.0, dt=0.1, scheme="picard")
    rk4 = solve_dirichlet(J, lat, u0, g, T=1.0, dt=0.001, scheme="rk4", save_every=100)
    diff = np.abs(pic.values - rk4.values).max()
    ok = low >= -1e-12 and diff <= 1e-8 and lat.n_omega == 125
    report(capsys, 10, ok, f"100 pairs min(u-w)={low:.3g} (>= -1e-12) picard vs rk4 on 5^3={diff:.3g} (<= 1e-8)")


def test_criterion_11_structural_oracles(capsys, J):
    lat = LatticeDomain.for_kernel(1, 0.5, 0.5, 0.5, 0.5, J.radius_z, J.radius_s)
    u = np.random.default_rng(11).standard_normal(lat.size)
    fast = group_convolve(Field(lat, u), J).values
    vol = lat.cell_volume
    slow = np.zeros(lat.n_omega)
    for i, p in enumerate(lat.omega_nodes):
        P = lat.point(p)
        acc = 0.0
        for q in range(lat.size):
            w = group_mul(P, group_inverse(lat.point(q)))
            acc = acc + float(J.evaluate(w.x, w.y, w.s)) * vol * u[q]
        slow[i] = acc
    bitwise = np.array_equal(fast, slow)

    box = LatticeDomain.for_kernel(1, 0.5, 0.5, 1.0, 1.0, J.radius_z, J.radius_s + 0.3)
    sym = build_kernel_matrix(J, box).asymmetry
    bad = build_kernel_matrix(replace(J, shift=0.3), box)
    broken = bad.asymmetry > 1e-3 * bad.max_entry

    disc, scale = convolution_multiplier_check(lambda r, s: np.exp(-r * r - s * s), J, default_grid())
    ok = bitwise and sym == 0.0 and broken and disc <= 5e-3 * scale
    report(capsys, 11, ok, f"bitwise={bitwise} asymmetry={sym:.3g} (== 0) "
                           f"negative control asymmetry={bad.asymmetry:.3g} "
                           f"multiplier discrepancy={disc / scale:.3g} x sup|f^| (<= 5e-3)")
