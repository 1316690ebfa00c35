"""Named experiments: parameter reading, execution and pass/fail checks.

Each experiment has a ``params`` function that reads a Config (recording
every default it falls back on) and a ``run`` function that turns those
parameters into an ExperimentResult.  Results are long-format rows
(series, key, value) so every experiment shares one CSV layout.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cauchy import (SpectralMultiplier, lp_decay, nonlocal_heat_gap,
                     profile_convergence, sup_norm_decay)
from .config import Config, ConfigError
from .eigen import dirichlet_principal, neumann_gap, verify_decay
from .group import LatticeDomain
from .heat import consistency_error, eps_convergence_study, eps_lattice, gaussian_test_field
from .kernels import build_kernel, rescaled_kernel
from .nonlocal_ import (ResolutionError, build_kernel_matrix, check_resolution, solve_dirichlet,
                        solve_neumann)
from .radial import RadialProfile
from .transform import default_grid, roundtrip_error

__all__ = ["Check", "ExperimentResult", "EXPERIMENTS", "read_params", "run_experiment",
           "parallel_map", "ROUNDTRIP_PROFILES", "closed_form_eigen_checks"]


@dataclass
class Check:
    name: str
    value: float
    target: str
    passed: bool


@dataclass
class ExperimentResult:
    name: str
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, series, key, value):
        self.rows.append((series, key, float(value)))

    def check(self, name, value, target, passed):
        self.checks.append(Check(name, float(value), target, bool(passed)))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["series", "key", "value"])
            for series, key, value in self.rows:
                w.writerow([series, key if isinstance(key, str) else repr(float(key)), repr(value)])


def parallel_map(func, items, workers=1):
    """Ordered map; with workers > 1 tasks run on a thread pool.

    Each task is independent and its result is placed by position, so the
    output does not depend on the worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _strictly_decreasing(values):
    values = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(values) < 0))


# ---------------------------------------------------------------------------
# Shared parameter groups


def _grid_params(cfg: Config, prefix="grid"):
    return {
        "n": cfg.int("n", 1),
        "lam_min": cfg.float(f"{prefix}.lam_min", 1e-2),
        "lam_max": cfg.float(f"{prefix}.lam_max", 40.0),
        "dtau": cfg.float(f"{prefix}.dtau", 0.1),
        "dlam_far": cfg.float(f"{prefix}.dlam_far", 0.25),
        "mu_max": cfg.float(f"{prefix}.mu_max", 80.0),
    }


def _grid(p):
    return default_grid(**p)


def _times(cfg: Config):
    t_min = cfg.float("time.t_min", 10.0)
    t_max = cfg.float("time.t_max", 100.0)
    count = cfg.int("time.count", 7)
    if not 0 < t_min < t_max:
        raise ConfigError("need 0 < time.t_min < time.t_max")
    if count < 5:
        raise ConfigError("time.count must be at least 5 for slope fits")
    return np.geomspace(t_min, t_max, count)


def _ladder(cfg: Config):
    ladder = np.array(cfg.floats("time.ladder", [10.0, 20.0, 40.0, 80.0]))
    if ladder.size < 2 or np.any(np.diff(ladder) <= 0) or ladder[0] <= 0:
        raise ConfigError("time.ladder must be increasing positive times")
    return ladder


def _gaussian_u0(cfg: Config):
    return {
        "a": cfg.float("u0.a", 1.0 / 6.0),
        "b": cfg.float("u0.b", 1.0),
        "r_max": cfg.float("profile.r_max", 14.0),
        "s_max": cfg.float("profile.s_max", 12.0),
        "n_r": cfg.int("profile.n_r", 256),
        "n_s": cfg.int("profile.n_s", 256),
    }


def _u0_profile(p, n):
    a, b = p["a"], p["b"]
    return RadialProfile.from_function(lambda r, s: np.exp(-a * r * r - b * s * s), n,
                                       p["r_max"], p["s_max"], p["n_r"], p["n_s"])


def _lattice_params(cfg: Config, h=0.5, omega=2.0):
    p = {
        "h": cfg.float("lattice.h", h),
        "omega_z": cfg.float("omega.z", omega),
        "omega_s": cfg.float("omega.s", omega),
        "radius_z": cfg.float("kernel.radius_z", 2.0),
        "shape": cfg.str("kernel.shape", "ball_bump"),
    }
    if p["h"] <= 0 or p["omega_z"] <= 0 or p["omega_s"] <= 0:
        raise ConfigError("lattice.h, omega.z and omega.s must be positive")
    return p


def _kernel_and_lattice(p):
    J = build_kernel(1, p["shape"], p["radius_z"])
    lat = LatticeDomain.for_kernel(1, p["h"], p["h"], p["omega_z"], p["omega_s"],
                                   J.radius_z, J.radius_s)
    check_resolution(J, lat)
    return J, lat


# ---------------------------------------------------------------------------
# plancherel


def _g(a, b=1.0, shift=0.0):
    return lambda r, s: np.exp(-a * r * r - b * (s - shift) ** 2)


ROUNDTRIP_PROFILES = {
    "gaussian": _g(1.0),
    "anisotropic": _g(2.0, 0.5),
    "modulated": lambda r, s: np.exp(-r * r - s * s) * np.cos(s),
    "ring": lambda r, s: r * r * np.exp(-r * r - s * s),
    "offset": _g(1.0, 1.0, 0.5),
}


def _plancherel_params(cfg):
    return {
        "grid": _grid_params(cfg),
        "coarse": _grid_params_coarse(cfg),
        "n_r": cfg.int("profile.n_r", 256),
        "n_s": cfg.int("profile.n_s", 256),
        "coarse_n_r": cfg.int("coarse.n_r", 192),
        "coarse_n_s": cfg.int("coarse.n_s", 192),
        "r_max": cfg.float("profile.r_max", 8.0),
        "s_max": cfg.float("profile.s_max", 12.0),
        "tol": cfg.float("check.tolerance", 1e-3),
    }


def _grid_params_coarse(cfg):
    p = _grid_params(cfg)
    p.update(dtau=cfg.float("coarse.dtau", 0.2), lam_max=cfg.float("coarse.lam_max", 30.0),
             mu_max=cfg.float("coarse.mu_max", 60.0))
    return p


def _plancherel_run(p, workers):
    res = ExperimentResult("plancherel")
    fine, coarse = _grid(p["grid"]), _grid(p["coarse"])
    n = p["grid"]["n"]

    def one(name):
        f = ROUNDTRIP_PROFILES[name]
        ef = roundtrip_error(RadialProfile.from_function(f, n, p["r_max"], p["s_max"], p["n_r"],
                                                         p["n_s"]), fine)
        ec = roundtrip_error(RadialProfile.from_function(f, n, p["r_max"], p["s_max"],
                                                         p["coarse_n_r"], p["coarse_n_s"]), coarse)
        return ec, ef

    names = list(ROUNDTRIP_PROFILES)
    for name, (ec, ef) in zip(names, parallel_map(one, names, workers)):
        res.add("roundtrip_error_coarse", name, ec)
        res.add("roundtrip_error", name, ef)
        res.check(f"roundtrip_{name}", ef, f"<= {p['tol']:g}", ef <= p["tol"])
        res.check(f"refinement_{name}", ef / ec, "< 1 (fine / coarse)", ef < ec)
    return res


# ---------------------------------------------------------------------------
# cauchy-decay, lp-decay, profile


def _cauchy_params(cfg):
    return {
        "grid": _grid_params(cfg),
        "u0": _gaussian_u0(cfg),
        "times": _times(cfg),
        "ladder": _ladder(cfg),
        "slope_target": cfg.float("check.slope_target", -2.0),
        "slope_tol": cfg.float("check.slope_tol", 0.1),
    }


def _cauchy_run(p, workers):
    res = ExperimentResult("cauchy-decay")
    grid = _grid(p["grid"])
    u0 = _u0_profile(p["u0"], grid.n)
    times, ladder = p["times"], p["ladder"]
    tasks = {
        "nonlocal": lambda: sup_norm_decay(u0, SpectralMultiplier.nonlocal_(), times, grid),
        "heat": lambda: sup_norm_decay(u0, SpectralMultiplier.heat(), times, grid),
        "gap": lambda: nonlocal_heat_gap(u0, ladder, grid),
    }
    out = dict(zip(tasks, parallel_map(lambda k: tasks[k](), list(tasks), workers)))
    nl, heat, gap = out["nonlocal"], out["heat"], out["gap"]
    for t, v, s in zip(times, nl.norms, nl.scaled):
        res.add("sup_norm", t, v)
        res.add("scaled_sup_norm", t, s)
    for t, v in zip(times, heat.norms):
        res.add("heat_sup_norm", t, v)
    for t, v in zip(ladder, gap):
        res.add("scaled_gap", t, v)
    res.add("fitted_slope", "sup_norm", nl.slope)
    res.add("fitted_slope", "heat_sup_norm", heat.slope)
    res.notes["heat_slope"] = heat.slope
    tgt, tol = p["slope_target"], p["slope_tol"]
    res.check("sup_slope", nl.slope, f"{tgt:g} +- {tol:g}", abs(nl.slope - tgt) <= tol)
    res.check("gap_decreasing", float(np.max(np.diff(gap))), "< 0 (max successive change)",
              _strictly_decreasing(gap))
    return res


def _lp_params(cfg):
    p = _cauchy_params(cfg)
    p["p"] = cfg.float("lp.p", 4.0)
    p["slope_target"] = cfg.float("check.slope_target", -1.0)
    p["slope_tol"] = cfg.float("check.slope_tol", 0.15)
    if not p["p"] > 2:
        raise ConfigError("lp.p must exceed 2")
    return p


def _lp_run(p, workers):
    res = ExperimentResult("lp-decay")
    grid = _grid(p["grid"])
    u0 = _u0_profile(p["u0"], grid.n)
    table = lp_decay(u0, SpectralMultiplier.nonlocal_(), p["p"], p["times"], grid)
    for t, v, s in zip(table.times, table.norms, table.scaled):
        res.add("lp_norm", t, v)
        res.add("scaled_lp_norm", t, s)
    res.add("fitted_slope", "lp_norm", table.slope)
    n = grid.n
    res.notes["dilation_exponent"] = -(n + 1) * (1 - 1 / p["p"])
    res.notes["interpolation_exponent"] = -(n + 1) * (p["p"] - 2) / p["p"]
    tgt, tol = p["slope_target"], p["slope_tol"]
    res.check("lp_slope", table.slope, f"{tgt:g} +- {tol:g}", abs(table.slope - tgt) <= tol)
    return res


def _profile_params(cfg):
    return {
        "grid": _grid_params(cfg),
        "u0": _gaussian_u0(cfg),
        "ladder": _ladder(cfg),
        "max_disagreement": cfg.float("check.max_extrapolation_disagreement", 0.05),
    }


def _profile_run(p, workers):
    res = ExperimentResult("profile")
    grid = _grid(p["grid"])
    u0 = _u0_profile(p["u0"], grid.n)
    dist, G = profile_convergence(u0, SpectralMultiplier.nonlocal_(), p["ladder"], grid)
    for t, v in zip(p["ladder"], dist):
        res.add("profile_distance", t, v)
    dis = G.diagnostics["extrapolation_disagreement"]
    res.add("extrapolation_disagreement", "zero_frequency", dis)
    res.check("profile_decreasing", float(np.max(np.diff(dist))), "< 0 (max successive change)",
              _strictly_decreasing(dist))
    res.check("extrapolation", dis, f"<= {p['max_disagreement']:g}", dis <= p["max_disagreement"])
    return res


# ---------------------------------------------------------------------------
# dirichlet-decay, neumann-mass, eigen


def _dirichlet_params(cfg):
    p = _lattice_params(cfg)
    p.update(T=cfg.float("time.T", 60.0), dt=cfg.float("time.dt", 0.5),
             scheme=cfg.str("solver.scheme", "exact_expm"), seed=cfg.int("run.seed", 0),
             trials=cfg.int("run.trials", 3), rate_tol=cfg.float("check.rate_tol", 1e-6),
             slack=cfg.float("check.slack", 1e-6), tail_tol=cfg.float("check.tail_tol", 0.02))
    return p


def _dirichlet_run(p, workers):
    res = ExperimentResult("dirichlet-decay")
    J, lat = _kernel_and_lattice(p)
    K = build_kernel_matrix(J, lat)
    eig = dirichlet_principal(K)
    res.add("lambda1", "value", eig.value)
    res.add("lambda1", "residual", eig.residual)
    res.add("lambda1", "gap", eig.gap)
    tr = solve_dirichlet(K, lat, eig.vector.values, T=p["T"], dt=p["dt"], scheme=p["scheme"])
    norms = tr.l2_norms()
    rates = -np.diff(np.log(norms)) / np.diff(tr.times)
    for t, v in zip(tr.times, norms):
        res.add("phi1_l2", t, v)
    dev = float(np.abs(rates - eig.value).max())
    res.check("phi1_rate", dev, f"|rate - lambda1| <= {p['rate_tol']:g}", dev <= p["rate_tol"])
    rng = np.random.default_rng(p["seed"])
    starts = [rng.standard_normal(lat.n_omega) for _ in range(p["trials"])]

    def one(u0):
        traj = solve_dirichlet(K, lat, u0, T=p["T"], dt=p["dt"], scheme=p["scheme"])
        return traj.times, verify_decay(traj, eig.value, slack=p["slack"])

    for i, (times, rep) in enumerate(parallel_map(one, starts, workers)):
        for t, v in zip(times, rep["norms"]):
            res.add(f"random{i}_l2", t, v)
        res.check(f"random{i}_bound", rep["max_ratio"], f"<= 1 + {p['slack']:g}", rep["bound_holds"])
        dev = abs(rep["rate_ratio"] - 1)
        res.check(f"random{i}_tail_rate", dev, f"|rate/lambda1 - 1| <= {p['tail_tol']:g}",
                  dev <= p["tail_tol"])
    return res


def _neumann_params(cfg):
    p = _lattice_params(cfg)
    p.update(T_mass=cfg.float("time.T_mass", 10.0), T=cfg.float("time.T", 200.0),
             dt=cfg.float("time.dt", 0.5), scheme=cfg.str("solver.scheme", "exact_expm"),
             seed=cfg.int("run.seed", 0), trials=cfg.int("run.trials", 3),
             mass_tol=cfg.float("check.mass_tol", 1e-10), tail_tol=cfg.float("check.tail_tol", 0.02))
    return p


def _neumann_run(p, workers):
    res = ExperimentResult("neumann-mass")
    J, lat = _kernel_and_lattice(p)
    K = build_kernel_matrix(J, lat)
    gap = neumann_gap(K)
    res.add("beta1", "value", gap.value)
    res.add("beta1", "residual", gap.residual)
    rng = np.random.default_rng(p["seed"])
    starts = [rng.random(lat.n_omega) for _ in range(p["trials"])]

    def one(u0):
        short = solve_neumann(K, lat, u0, T=p["T_mass"], dt=p["dt"], scheme=p["scheme"])
        long = solve_neumann(K, lat, u0, T=p["T"], dt=p["dt"], scheme=p["scheme"])
        return short, verify_decay(long, gap.value, mode="neumann"), long.times

    for i, (short, rep, times) in enumerate(parallel_map(one, starts, workers)):
        m = short.masses()
        drift = float(np.abs(m - m[0]).max())
        for t, v in zip(short.times, m):
            res.add(f"mass{i}", t, v)
        for t, v in zip(times, rep["norms"]):
            res.add(f"deviation{i}_l2", t, v)
        res.check(f"mass{i}_drift", drift, f"<= {p['mass_tol']:g}", drift <= p["mass_tol"])
        dev = abs(rep["rate_ratio"] - 1)
        res.check(f"deviation{i}_rate", dev, f"|rate/beta1 - 1| <= {p['tail_tol']:g}",
                  dev <= p["tail_tol"])
    return res


def closed_form_eigen_checks(J, h=0.5):
    """Eigen solvers on 1- and 2-node domains against their closed forms.

    One node: lambda1 = 1 - J(0) h_vol.  Two nodes a step h apart in s:
    K_Omega = [[a, b], [b, a]], lambda1 = 1 - a - b, beta1 = 2b.
    Returns a list of (name, computed, exact).
    """
    lat = LatticeDomain.for_kernel(1, h, h, h, h, J.radius_z, J.radius_s)
    X, Y, S = lat.coords()
    origin = np.flatnonzero((np.abs(X[:, 0]) < h / 2) & (np.abs(Y[:, 0]) < h / 2) & (np.abs(S) < h / 2))
    above = np.flatnonzero((np.abs(X[:, 0]) < h / 2) & (np.abs(Y[:, 0]) < h / 2)
                           & (np.abs(S - h) < h / 2))
    vol = lat.cell_volume
    a = float(J.evaluate(np.zeros(1), np.zeros(1), 0.0)) * vol
    b = float(J.evaluate(np.zeros(1), np.zeros(1), -h)) * vol
    out = []
    mask = np.zeros(lat.size, bool)
    mask[origin] = True
    one = lat.with_mask(mask)
    out.append(("dirichlet_1x1", dirichlet_principal(build_kernel_matrix(J, one)).value, 1 - a))
    mask[above] = True
    two = lat.with_mask(mask)
    K2 = build_kernel_matrix(J, two)
    out.append(("dirichlet_2x2", dirichlet_principal(K2).value, 1 - a - b))
    out.append(("neumann_2x2", neumann_gap(K2).value, 2 * b))
    return out


def _eigen_params(cfg):
    p = _lattice_params(cfg)
    p["tol"] = cfg.float("check.closed_form_tol", 1e-12)
    p["residual_tol"] = cfg.float("check.residual_tol", 1e-10)
    return p


def _eigen_run(p, workers):
    res = ExperimentResult("eigen")
    J, lat = _kernel_and_lattice(p)
    for name, got, exact in closed_form_eigen_checks(J, p["h"]):
        res.add(name, "computed", got)
        res.add(name, "exact", exact)
        res.check(name, abs(got - exact), f"<= {p['tol']:g}", abs(got - exact) <= p["tol"])
    K = build_kernel_matrix(J, lat)
    for name, e in (("lambda1", dirichlet_principal(K)), ("beta1", neumann_gap(K))):
        res.add(name, "value", e.value)
        res.add(name, "next", e.next_value)
        res.add(name, "residual", e.residual)
        res.check(f"{name}_residual", e.residual, f"<= {p['residual_tol']:g}",
                  e.residual <= p["residual_tol"])
    return res


# ---------------------------------------------------------------------------
# consistency, eps-convergence


def _eps_list(cfg):
    eps = cfg.floats("eps.values", [0.4, 0.2, 0.1])
    if len(eps) < 2 or any(e <= 0 for e in eps):
        raise ConfigError("eps.values needs at least two positive values")
    return [float(e) for e in eps]


def _eps_common(cfg, omega_s):
    p = {
        "eps": _eps_list(cfg),
        "omega_z": cfg.float("omega.z", 0.4),
        "omega_s": cfg.float("omega.s", omega_s),
        "cells": cfg.int("lattice.cells", 4),
        "radius_z": cfg.float("kernel.radius_z", 2.0),
        "shape": cfg.str("kernel.shape", "ball_bump"),
    }
    if p["cells"] < 3:
        raise ResolutionError("lattice.cells must be at least 3 (6 cells across the support)")
    return p


def _validate_eps_lattices(p):
    J = build_kernel(1, p["shape"], p["radius_z"])
    for eps in p["eps"]:
        check_resolution(rescaled_kernel(J, eps), eps_lattice(J, eps, p["omega_z"], p["omega_s"],
                                                              p["cells"]))
    return J


EXACT_FIELDS = {
    "one": (lambda X, Y, S: np.ones_like(S), lambda X, Y, S: np.zeros_like(S)),
    "x": (lambda X, Y, S: X[:, 0], lambda X, Y, S: np.zeros_like(S)),
    "s": (lambda X, Y, S: S, lambda X, Y, S: np.zeros_like(S)),
    "x2": (lambda X, Y, S: X[:, 0] ** 2, lambda X, Y, S: np.full_like(S, 2.0)),
}


def _consistency_params(cfg):
    p = _eps_common(cfg, 0.2)
    p.update(exact_tol=cfg.float("check.exact_tol", 1e-3), min_order=cfg.float("check.min_order", 0.5))
    return p


def _consistency_run(p, workers):
    res = ExperimentResult("consistency")
    J = _validate_eps_lattices(p)
    v, Lv = gaussian_test_field()
    tasks = list(EXACT_FIELDS) + ["gaussian"]

    def one(name):
        f, Lf = (v, Lv) if name == "gaussian" else EXACT_FIELDS[name]
        return consistency_error(J, p["eps"], f, Lf, p["omega_z"], p["omega_s"], p["cells"])

    for name, tab in zip(tasks, parallel_map(one, tasks, workers)):
        for e, err in zip(tab.eps, tab.errors):
            res.add(f"{name}_sup_error", e, err)
        if name == "gaussian":
            res.add("fitted_order", "gaussian", tab.order)
            res.check("gaussian_order", tab.order, f">= {p['min_order']:g}", tab.order >= p["min_order"])
            res.check("gaussian_decreasing", float(np.max(np.diff(tab.errors))), "< 0",
                      _strictly_decreasing(tab.errors))
        else:
            worst = float(tab.errors.max())
            res.check(f"exact_{name}", worst, f"<= {p['exact_tol']:g}", worst <= p["exact_tol"])
    return res


def _eps_params(cfg):
    p = _eps_common(cfg, 0.15)
    p.update(T=cfg.float("time.T", 0.1), alpha=cfg.float("barrier.alpha", 0.5),
             margin=cfg.float("barrier.margin", 0.1), save_every=cfg.int("time.save_every", 10),
             min_order=cfg.float("check.min_order", 0.5))
    return p


def _eps_run(p, workers):
    res = ExperimentResult("eps-convergence")
    J = _validate_eps_lattices(p)
    rows, order = eps_convergence_study(J, p["eps"], T=p["T"], omega_z=p["omega_z"],
                                        omega_s=p["omega_s"], cells=p["cells"], alpha=p["alpha"],
                                        margin=p["margin"], save_every=p["save_every"])
    for r in rows:
        for key in ("sup_error", "F_sup", "G_sup", "max_ratio", "omega_nodes"):
            res.add(key, r["eps"], r[key])
    res.add("barrier", "K1", rows[0]["K1"])
    res.add("barrier", "K2", rows[0]["K2"])
    res.add("fitted_order", "sup_error", order)
    res.check("order", order, f">= {p['min_order']:g}", order >= p["min_order"])
    worst = max(r["max_ratio"] for r in rows)
    res.check("barrier", worst, "<= 1 (error / barrier)", not any(r["violated"] for r in rows))
    return res


# ---------------------------------------------------------------------------

EXPERIMENTS = {
    "plancherel": (_plancherel_params, _plancherel_run,
                   "transform roundtrip on five profiles at two resolutions"),
    "cauchy-decay": (_cauchy_params, _cauchy_run,
                     "sup-norm decay slope and nonlocal-to-heat gap for a Gaussian"),
    "profile": (_profile_params, _profile_run,
                "convergence of the rescaled solution to its asymptotic profile"),
    "lp-decay": (_lp_params, _lp_run, "L^p decay slope for a Gaussian"),
    "dirichlet-decay": (_dirichlet_params, _dirichlet_run,
                        "Dirichlet decay against the principal eigenvalue"),
    "neumann-mass": (_neumann_params, _neumann_run,
                     "Neumann mass conservation and decay to the mean"),
    "eps-convergence": (_eps_params, _eps_run,
                        "rescaled Dirichlet problems against an exact heat solution"),
    "consistency": (_consistency_params, _consistency_run,
                    "rescaled operator against L on exact and Gaussian fields"),
    "eigen": (_eigen_params, _eigen_run, "closed-form eigen checks and lattice eigenpairs"),
}


def read_params(name, cfg: Config):
    """Parameters for ``name``; raises KeyError for unknown experiments."""
    return EXPERIMENTS[name][0](cfg)


def run_experiment(name, cfg: Config):
    params = read_params(name, cfg)
    workers = cfg.int("run.workers", 1)
    if workers < 1:
        raise ConfigError("run.workers must be at least 1")
    return EXPERIMENTS[name][1](params, workers)
