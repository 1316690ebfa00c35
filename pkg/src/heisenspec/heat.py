"""Finite-difference heat flow v_t = L v on lattice boxes, and nonlocal-to-local diagnostics.

The Dirichlet condition is imposed on the exterior nodes touched by the
stencil (the one-cell collar).  The consistency diagnostic compares the
rescaled nonlocal operator with L on smooth fields; the barrier check tests
the supersolution K1 eps^alpha t + K2 eps against a measured error trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .group import Field, LatticeDomain
from .kernels import KernelSpec, rescaled_kernel
from .nonlocal_ import (StabilityError, Trajectory, apply_rescaled_operator, check_resolution,
                        solve_rescaled_dirichlet)

__all__ = [
    "laplacian_matrix",
    "explicit_step_limit",
    "solve_heat_dirichlet",
    "eps_lattice",
    "consistency_error",
    "ConsistencyTable",
    "barrier_check",
    "fit_barrier_constants",
    "fit_order",
    "gaussian_test_field",
    "heat_mode_solution",
    "eps_convergence_study",
]


def laplacian_matrix(lattice: LatticeDomain):
    """Sparse centered-difference L with Omega rows and all-node columns."""
    n, hz, hs = lattice.n, lattice.hz, lattice.hs
    rows = lattice.omega_nodes
    idx = lattice.multi_index(rows)
    shape = np.array(lattice.shape)
    if np.any(idx == 0) or np.any(idx == shape - 1):
        raise ValueError("finite-difference stencil exits the lattice at an Omega node")
    X, Y, _ = lattice.coords()
    xs, ys = X[rows], Y[rows]
    strides = np.array([int(np.prod(shape[a + 1:])) for a in range(lattice.dim)])
    sa = lattice.dim - 1
    local = np.arange(rows.size)
    ri, ci, vals = [], [], []

    def add(offsets, coef):
        col = rows.copy()
        for a, o in offsets:
            col = col + o * strides[a]
        ri.append(local)
        ci.append(col)
        vals.append(np.broadcast_to(coef, rows.shape).astype(float))

    r2 = np.sum(xs**2 + ys**2, axis=1)
    diag = np.full(rows.size, -2.0 * (2 * n) / hz**2) - 2.0 * 0.25 * r2 / hs**2
    add([], diag)
    for a in range(2 * n):
        add([(a, 1)], 1.0 / hz**2)
        add([(a, -1)], 1.0 / hz**2)
    add([(sa, 1)], 0.25 * r2 / hs**2)
    add([(sa, -1)], 0.25 * r2 / hs**2)
    c = 1.0 / (4 * hz * hs)
    for j in range(n):
        for a, coef in ((n + j, xs[:, j]), (j, -ys[:, j])):
            add([(sa, 1), (a, 1)], coef * c)
            add([(sa, 1), (a, -1)], -coef * c)
            add([(sa, -1), (a, 1)], -coef * c)
            add([(sa, -1), (a, -1)], coef * c)
    M = sps.csr_matrix((np.concatenate(vals), (np.concatenate(ri), np.concatenate(ci))),
                       shape=(rows.size, lattice.size))
    return M


def explicit_step_limit(lattice: LatticeDomain):
    """dt bound for forward Euler: 1 / (2 (2n/hz^2 + max|z|^2/(4 hs^2) + drift slack)).

    With hz = hs = h this is h^2 / (2 (2n + max|z|^2/4 + slack)); the slack
    max_p sum_j (|x_j| + |y_j|) / (2 hz hs) bounds the mixed-term stencil.
    """
    n = lattice.n
    X, Y, _ = lattice.coords()
    rows = lattice.omega_nodes
    r2 = np.sum(X[rows] ** 2 + Y[rows] ** 2, axis=1).max()
    slack = np.sum(np.abs(X[rows]) + np.abs(Y[rows]), axis=1).max() / (2 * lattice.hz * lattice.hs)
    return 1.0 / (2.0 * (2 * n / lattice.hz**2 + 0.25 * r2 / lattice.hs**2 + slack))


def solve_heat_dirichlet(lattice: LatticeDomain, u0, g=None, T=1.0, dt=None, mode="explicit",
                         save_every=1):
    """v_t = L v on Omega, v = g(X, Y, S, t) on the exterior nodes of the stencil."""
    M = laplacian_matrix(lattice)
    rows = lattice.omega_nodes
    A = M[:, rows].tocsr()
    ext = np.flatnonzero(~lattice.mask)
    Aext = M[:, ext].tocsr()
    X, Y, S = lattice.coords()
    limit = explicit_step_limit(lattice)
    if dt is None:
        dt = limit if mode == "explicit" else min(lattice.hz, lattice.hs) ** 2
        dt = T / math.ceil(T / dt)
    if mode == "explicit" and dt > limit * (1 + 1e-12):
        raise StabilityError(f"dt = {dt:g} exceeds the explicit limit {limit:g}")
    steps = int(round(T / dt))
    if not math.isclose(steps * dt, T, rel_tol=1e-9):
        raise ValueError("T must be a multiple of dt")
    u = np.array(u0.omega_values() if isinstance(u0, Field) else u0, dtype=float)
    if u.shape == (lattice.size,):
        u = u[lattice.mask]

    def b(t):
        if g is None:
            return 0.0
        return Aext @ np.broadcast_to(g(X[ext], Y[ext], S[ext], t), ext.shape)

    if mode == "implicit":
        lu = spla.splu((sps.identity(rows.size, format="csc") - dt * A).tocsc())
    elif mode != "explicit":
        raise ValueError("mode must be 'explicit' or 'implicit'")
    times, out = [0.0], [u.copy()]
    for i in range(1, steps + 1):
        t = (i - 1) * dt
        if mode == "explicit":
            u = u + dt * (A @ u + b(t))
        else:
            u = lu.solve(u + dt * b(t + dt))
        if i % save_every == 0 or i == steps:
            times.append(i * dt)
            out.append(u.copy())
    return Trajectory(lattice, np.array(times), np.array(out),
                      {"problem": "heat_dirichlet", "mode": mode, "dt": dt})


# ---------------------------------------------------------------------------
# Test fields


def gaussian_test_field(a=1.0, b=1.0, cx=0.3, cy=-0.2):
    """v = exp(-a |z - c|^2 - b s^2) for n = 1 and its exact L v.

    With c != 0 the field is not radial, so the rotation term of L is active:
    L v = [4a^2 |z-c|^2 - 4a + |z|^2 (b^2 s^2 - b/2) - 4ab s (x cy - y cx)] v.
    """

    def v(X, Y, S):
        x, y = X[..., 0], Y[..., 0]
        return np.exp(-a * ((x - cx) ** 2 + (y - cy) ** 2) - b * S**2)

    def Lv(X, Y, S):
        x, y = X[..., 0], Y[..., 0]
        d2 = (x - cx) ** 2 + (y - cy) ** 2
        r2 = x**2 + y**2
        bracket = 4 * a * a * d2 - 4 * a + r2 * (b * b * S**2 - 0.5 * b) - 4 * a * b * S * (x * cy - y * cx)
        return bracket * v(X, Y, S)

    return v, Lv


def heat_mode_solution(lam=3.0, c_radial=1.0, c_rot=1.0, offset=0.0):
    """Exact solution of v_t = L v for n = 1 built from two eigenfunctions of L:

        cos(lam s) e^{-lam |z|^2/4}                   eigenvalue -lam
        (x cos(lam s) - y sin(lam s)) e^{-lam |z|^2/4}  eigenvalue -3 lam

    Returns v(X, Y, S, t).
    """

    def v(X, Y, S, t):
        x, y = X[..., 0], Y[..., 0]
        env = np.exp(-lam * (x * x + y * y) / 4)
        cs, sn = np.cos(lam * S), np.sin(lam * S)
        return (offset + c_radial * cs * env * math.exp(-lam * t)
                + c_rot * (x * cs - y * sn) * env * math.exp(-3 * lam * t))

    return v


# ---------------------------------------------------------------------------
# Consistency


def eps_lattice(kernel: KernelSpec, eps, omega_z, omega_s, cells=4):
    """Box lattice resolving J^eps with ``cells`` cells per support half-width on each axis."""
    Je = rescaled_kernel(kernel, eps)
    hz = Je.radius_z / cells
    hs = Je.radius_s / cells
    return LatticeDomain.for_kernel(kernel.n, hz, hs, omega_z, omega_s, Je.radius_z, Je.radius_s)


def fit_order(eps, errors):
    """Slope of log(error) against log(eps)."""
    return float(np.polyfit(np.log(eps), np.log(errors), 1)[0])


@dataclass
class ConsistencyTable:
    eps: np.ndarray
    errors: np.ndarray
    order: float
    nodes: list = field(default_factory=list)


def consistency_error(kernel: KernelSpec, eps_list, v, Lv, omega_z=0.4, omega_s=0.2, cells=4):
    """sup over Omega of |L_eps v - L v| for each eps, with a fitted order in eps.

    ``v`` and ``Lv`` are functions of (X, Y, S).  Each eps gets its own lattice
    (see ``eps_lattice``).
    """
    errors, nodes = [], []
    for eps in eps_list:
        lat = eps_lattice(kernel, eps, omega_z, omega_s, cells)
        check_resolution(rescaled_kernel(kernel, eps), lat)
        approx = apply_rescaled_operator(kernel, eps, lat.field(v), lat).values
        exact = lat.sample(Lv)[lat.mask]
        errors.append(float(np.abs(approx - exact).max()))
        nodes.append(lat.size)
    errors = np.array(errors)
    eps = np.array(eps_list, dtype=float)
    order = fit_order(eps, errors) if np.all(errors > 0) and eps.size > 1 else float("nan")
    return ConsistencyTable(eps, errors, order, nodes)


# ---------------------------------------------------------------------------
# Barrier


def fit_barrier_constants(F_sup, G_sup, eps, alpha, margin=0.1):
    """K1 = (1+margin) sup|F| / eps^alpha, K2 = (1+margin) sup|G| / eps."""
    return (1 + margin) * F_sup / eps**alpha, (1 + margin) * G_sup / eps


def barrier_check(times, err, K1, K2, eps, alpha):
    """Compare |u_eps - v| (shape (len(times), nodes)) with K1 eps^alpha t + K2 eps."""
    times = np.asarray(times, dtype=float)
    err = np.abs(np.asarray(err, dtype=float))
    bound = K1 * eps**alpha * times + K2 * eps
    worst = err.max(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bound > 0, worst / bound, np.where(worst > 0, np.inf, 0.0))
    return {
        "violated": bool(np.any(worst > bound)),
        "max_ratio": float(ratio.max()),
        "K1": float(K1),
        "K2": float(K2),
        "intercept": float(K2 * eps),
    }


def _clamp_to_box(X, Y, S, omega_z, omega_s):
    return np.clip(X, -omega_z, omega_z), np.clip(Y, -omega_z, omega_z), np.clip(S, -omega_s, omega_s)


def eps_convergence_study(kernel: KernelSpec, eps_list, v_exact=None, T=0.1, omega_z=0.4,
                          omega_s=0.15, cells=4, alpha=0.5, margin=0.1, save_every=10):
    """Run the rescaled Dirichlet problem against an exact heat solution.

    Exterior data is v evaluated at the nearest point of the box Omega, so it
    matches v on the boundary and differs from v by O(eps) across the collar.
    One pair (K1, K2) is fitted from the consistency residual F = L_eps v - v_t
    and the exterior mismatch G over all eps, then the barrier is checked for
    every eps with those shared constants.  Returns (per-eps rows, fitted order).
    """
    v_exact = heat_mode_solution() if v_exact is None else v_exact
    runs = []
    for eps in eps_list:
        lat = eps_lattice(kernel, eps, omega_z, omega_s, cells)
        X, Y, S = lat.coords()
        mask = lat.mask

        def g(Xe, Ye, Se, t):
            return v_exact(*_clamp_to_box(Xe, Ye, Se, omega_z, omega_s), t)

        u0 = v_exact(X, Y, S, 0.0)[mask]
        traj = solve_rescaled_dirichlet(kernel, eps, lat, u0, g, T=T, save_every=save_every)
        err = traj.values - np.stack([v_exact(X, Y, S, t)[mask] for t in traj.times])
        F_sup = 0.0
        h = 1e-6
        for t in traj.times:
            Le = apply_rescaled_operator(kernel, eps, lat.field(lambda x, y, s: v_exact(x, y, s, t)),
                                         lat).values
            vt = (v_exact(X, Y, S, t + h)[mask] - v_exact(X, Y, S, t - h)[mask]) / (2 * h)
            F_sup = max(F_sup, float(np.abs(Le - vt).max()))
        ext = ~mask
        G_sup = max(float(np.abs(g(X[ext], Y[ext], S[ext], t) - v_exact(X[ext], Y[ext], S[ext], t)).max())
                    for t in traj.times)
        runs.append((eps, lat, traj, err, F_sup, G_sup))
    K1 = max(fit_barrier_constants(r[4], r[5], r[0], alpha, margin)[0] for r in runs)
    K2 = max(fit_barrier_constants(r[4], r[5], r[0], alpha, margin)[1] for r in runs)
    rows = []
    for eps, lat, traj, err, F_sup, G_sup in runs:
        report = barrier_check(traj.times, err, K1, K2, eps, alpha)
        rows.append({"eps": eps, "nodes": lat.size, "omega_nodes": lat.n_omega,
                     "sup_error": float(np.abs(err).max()), "F_sup": F_sup, "G_sup": G_sup, **report})
    order = fit_order([r["eps"] for r in rows], [r["sup_error"] for r in rows])
    return rows, order
