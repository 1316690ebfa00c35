"""Nonlocal Dirichlet and Neumann problems on lattice domains.

Dirichlet:  u' = K u - u on Omega, u = g outside Omega.
Neumann:    u'(p) = sum_{q in Omega} K[p, q] (u(q) - u(p)).
Rescaled:   u'(p) = eps^{-2} sum_q J^eps(p . q^{-1}) (u(q) - u(p)) h_vol, u = g outside.

K[p, q] = J(p . q^{-1}) h_vol is assembled once per lattice and kernel.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
import scipy.sparse as sps
from numpy.polynomial import chebyshev

from .group import Field, LatticeDomain, neighbour_blocks
from .kernels import KernelSpec, rescaled_kernel

__all__ = [
    "KernelMatrix",
    "Trajectory",
    "ResolutionError",
    "StabilityError",
    "build_kernel_matrix",
    "solve_linear",
    "solve_dirichlet",
    "solve_neumann",
    "apply_rescaled_operator",
    "rescaled_generator",
    "solve_rescaled_dirichlet",
    "check_comparison",
    "check_resolution",
    "picard_window",
    "picard_window_bound",
    "neumann_generator",
    "lattice_moment_factor",
]

DENSE_LIMIT = 8000
SCHEMES = ("exact_expm", "rk4", "euler", "picard")


class ResolutionError(ValueError):
    """The lattice does not resolve the kernel support."""


class StabilityError(ValueError):
    """The time step violates the scheme's stability limit."""


# ---------------------------------------------------------------------------
# Kernel matrix


@dataclass
class KernelMatrix:
    """Rows are the nodes ``rows`` (Omega by default), columns all lattice nodes."""

    lattice: LatticeDomain
    rows: np.ndarray
    matrix: object
    asymmetry: float = 0.0

    @property
    def symmetric(self):
        return self.asymmetry <= 1e-15 * max(self.max_entry, 1e-300)

    @property
    def is_sparse(self):
        return sps.issparse(self.matrix)

    @property
    def max_entry(self):
        return float(self.matrix.max()) if self.matrix.shape[0] else 0.0

    def dense(self):
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def _cols(self, cols):
        return self.matrix[:, cols]

    def omega_block(self):
        return self._cols(self.lattice.omega_nodes)

    def exterior_block(self):
        return self._cols(np.flatnonzero(~self.lattice.mask))

    def row_sums(self):
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    @classmethod
    def from_array(cls, lattice, array):
        """Wrap a prescribed Omega x all array (for hand-built test problems)."""
        array = np.asarray(array, dtype=float)
        rows = lattice.omega_nodes
        block = array[:, rows] if array.shape[1] == lattice.size else array
        return cls(lattice, rows, array, float(np.abs(block - block.T).max()))


def build_kernel_matrix(kernel: KernelSpec, lattice: LatticeDomain, dense=None, im_sign=1.0):
    """K[p, q] = J(z_p - z_q, s_p - s_q - Im<z_p, z_q>/2) h_vol for p in Omega."""
    rows = lattice.omega_nodes
    vol = lattice.cell_volume
    ri, ci, vals = [], [], []
    local = np.arange(rows.size)
    for valid, q, wx, wy, sigma in neighbour_blocks(lattice, rows, kernel.radius_z,
                                                     kernel.radius_s, im_sign=im_sign):
        kq = kernel.evaluate(wx, wy, sigma) * vol
        keep = valid & (kq != 0)
        ri.append(local[keep])
        ci.append(q[keep])
        vals.append(kq[keep])
    ri = np.concatenate(ri)
    ci = np.concatenate(ci)
    vals = np.concatenate(vals)
    mat = sps.csr_matrix((vals, (ri, ci)), shape=(rows.size, lattice.size))
    block = mat[:, rows]
    asym = abs(block - block.T).max() if block.nnz else 0.0
    if dense is None:
        dense = rows.size <= DENSE_LIMIT
    return KernelMatrix(lattice, rows, mat.toarray() if dense else mat, float(asym))


# ---------------------------------------------------------------------------
# Trajectories


@dataclass
class Trajectory:
    """Omega values at stored times; ``values`` has shape (len(times), n_omega)."""

    lattice: LatticeDomain
    times: np.ndarray
    values: np.ndarray
    info: dict = field(default_factory=dict)

    def field_at(self, i):
        return Field(self.lattice, self.values[i], float(self.times[i]), on="omega")

    def l2_norms(self):
        return np.sqrt(np.sum(self.values**2, axis=1) * self.lattice.cell_volume)

    def masses(self):
        return np.sum(self.values, axis=1) * self.lattice.cell_volume

    def sup_norms(self):
        return np.abs(self.values).max(axis=1)

    def to_csv(self, path):
        nodes = self.lattice.omega_nodes
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "node_id", "value"])
            for t, row in zip(self.times, self.values):
                for node, v in zip(nodes, row):
                    w.writerow([repr(float(t)), int(node), repr(float(v))])

    def to_binary(self, path):
        """Header: magic, n, hz, hs, n_times, n_omega; then times and values, little-endian."""
        with open(path, "wb") as fh:
            fh.write(b"HSTRAJ01")
            fh.write(struct.pack("<iddqq", self.lattice.n, self.lattice.hz, self.lattice.hs,
                                 self.times.size, self.values.shape[1]))
            fh.write(np.asarray(self.times, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @staticmethod
    def read_binary(path):
        """Return (header dict, times, values) from a binary snapshot."""
        with open(path, "rb") as fh:
            if fh.read(8) != b"HSTRAJ01":
                raise ValueError("not a trajectory snapshot")
            n, hz, hs, nt, nn = struct.unpack("<iddqq", fh.read(struct.calcsize("<iddqq")))
            times = np.frombuffer(fh.read(8 * nt), dtype="<f8")
            values = np.frombuffer(fh.read(8 * nt * nn), dtype="<f8").reshape(nt, nn)
        return {"n": n, "hz": hz, "hs": hs}, times, values


# ---------------------------------------------------------------------------
# Linear evolution u' = A u + b(t)


def _as_operator(A):
    return A.tocsr() if sps.issparse(A) else np.asarray(A)


def _step_times(T, dt):
    steps = int(round(T / dt))
    if steps < 1 or not math.isclose(steps * dt, T, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError("T must be a positive multiple of dt")
    return steps


def solve_linear(A, u0, b, T, dt, scheme="rk4", save_every=1, picard_window_length=None,
                 b_constant=False):
    """Integrate u' = A u + b(t) from t=0 to T.

    ``b`` is a function of t (or None).  Returns (times, values) at every
    ``save_every``-th step.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    A = _as_operator(A)
    steps = _step_times(T, dt)
    u = np.array(u0, dtype=float)
    zero = np.zeros_like(u)
    bf = (lambda t: zero) if b is None else b
    times = [0.0]
    out = [u.copy()]

    if scheme == "exact_expm":
        b0 = bf(0.0)
        if not b_constant and b is not None and not np.array_equal(b0, bf(T)):
            raise ValueError("exact_expm needs time-constant boundary data")
        Ad = A.toarray() if sps.issparse(A) else A
        m = u.size
        aug = np.zeros((m + 1, m + 1))
        aug[:m, :m] = Ad * dt
        aug[:m, m] = b0 * dt
        P = scipy.linalg.expm(aug)
        prop, shift = P[:m, :m], P[:m, m]
        for i in range(1, steps + 1):
            u = prop @ u + shift
            if i % save_every == 0 or i == steps:
                times.append(i * dt)
                out.append(u.copy())
        return np.array(times), np.array(out)

    if scheme == "picard":
        length = picard_window_length if picard_window_length else dt
        sub = max(1, int(math.ceil(dt / length - 1e-12)))
        tau = dt / sub
        for i in range(1, steps + 1):
            for j in range(sub):
                t0 = (i - 1) * dt + j * tau
                u = picard_window(A, u, bf, t0, tau)
            if i % save_every == 0 or i == steps:
                times.append(i * dt)
                out.append(u.copy())
        return np.array(times), np.array(out)

    if scheme == "euler":
        norm = _norm_bound(A)
        if dt * norm >= 2.0:
            raise StabilityError(f"explicit Euler needs dt < 2/||A|| = {2 / norm:.3g}")

    def f(t, v):
        return A @ v + bf(t)

    for i in range(1, steps + 1):
        t = (i - 1) * dt
        if scheme == "euler":
            u = u + dt * f(t, u)
        else:
            k1 = f(t, u)
            k2 = f(t + dt / 2, u + dt / 2 * k1)
            k3 = f(t + dt / 2, u + dt / 2 * k2)
            k4 = f(t + dt, u + dt * k3)
            u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if i % save_every == 0 or i == steps:
            times.append(i * dt)
            out.append(u.copy())
    return np.array(times), np.array(out)


def _norm_bound(A):
    # infinity-norm bound on the spectrum
    return float(abs(A).sum(axis=1).max())


_CHEB_NODES = 17


def _integration_matrix(m):
    # Chebyshev-Lobatto nodes on [-1, 1] ascending; Q[i, j] integrates the
    # interpolant of nodal values from -1 to x_i.
    x = -np.cos(np.pi * np.arange(m) / (m - 1))
    V = chebyshev.chebvander(x, m - 1)
    Vinv = np.linalg.inv(V)
    Q = np.empty((m, m))
    for j in range(m):
        coef = Vinv[:, j]
        Q[:, j] = chebyshev.chebval(x, chebyshev.chebint(coef, lbnd=-1))
    return x, Q


_X_CHEB, _Q_CHEB = _integration_matrix(_CHEB_NODES)


def picard_window(A, w0, b, t0, tau, tol=1e-12, max_iter=500, cell_volume=1.0):
    """Iterate T(w)(t) = w0 + int_0^t (A w + b) dr on [t0, t0 + tau] to a fixed point.

    Time is discretized on Chebyshev-Lobatto nodes with spectral integration.
    Stops when successive iterates differ by < tol in the max-over-time
    L1 norm.  Returns w at t0 + tau.
    """
    times = t0 + 0.5 * tau * (_X_CHEB + 1.0)
    Q = 0.5 * tau * _Q_CHEB
    B = np.stack([b(t) for t in times])
    W = np.tile(w0, (times.size, 1))
    for _ in range(max_iter):
        F = (A @ W.T).T + B
        new = w0[None, :] + Q @ F
        diff = np.abs(new - W).sum(axis=1).max() * cell_volume
        W = new
        if diff < tol:
            return W[-1]
    raise RuntimeError("Picard iteration did not converge; shorten the window")


def picard_window_bound(kernel: KernelSpec, lattice: LatticeDomain, safety=0.9):
    """Window length t0 with (C + 1) t0 < 1, C = ||J||_inf |Omega|."""
    C = kernel.sup * lattice.n_omega * lattice.cell_volume
    return safety / (C + 1.0)


# ---------------------------------------------------------------------------
# Problems


def _exterior_coords(lattice):
    X, Y, S = lattice.coords()
    ext = ~lattice.mask
    return X[ext], Y[ext], S[ext]


def _boundary_source(Kext, lattice, g, scale=1.0):
    """b(t) = scale * K_ext g(t), with g a function (X, Y, S, t) on exterior nodes."""
    if g is None:
        return None
    X, Y, S = _exterior_coords(lattice)
    cache = {}

    def b(t):
        if t not in cache:
            if len(cache) > 64:
                cache.clear()
            cache[t] = scale * (Kext @ np.broadcast_to(g(X, Y, S, t), S.shape))
        return cache[t]

    return b


def _initial(u0, lattice):
    if isinstance(u0, Field):
        return np.array(u0.omega_values(), dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if u0.shape == (lattice.size,):
        return u0[lattice.mask]
    if u0.shape != (lattice.n_omega,):
        raise ValueError("initial data must cover Omega")
    return u0


def _kernel_matrix(J, lattice):
    return J if isinstance(J, KernelMatrix) else build_kernel_matrix(J, lattice)


def solve_dirichlet(J, lattice, u0, g=None, T=1.0, dt=0.01, scheme="rk4", save_every=1):
    """u' = K u - u on Omega with u = g(X, Y, S, t) on exterior nodes."""
    K = _kernel_matrix(J, lattice)
    Kom = K.omega_block()
    A = Kom - (sps.identity(Kom.shape[0], format="csr") if sps.issparse(Kom) else np.eye(Kom.shape[0]))
    b = _boundary_source(K.exterior_block(), lattice, g)
    window = None
    if scheme == "picard":
        if not isinstance(J, KernelSpec):
            raise ValueError("picard mode needs the KernelSpec to size its windows")
        window = picard_window_bound(J, lattice)
    times, vals = solve_linear(A, _initial(u0, lattice), b, T, dt, scheme, save_every,
                               picard_window_length=window)
    return Trajectory(lattice, times, vals, {"problem": "dirichlet", "scheme": scheme,
                                             "picard_window": window})


def neumann_generator(K: KernelMatrix):
    """A_N = K_Omega - diag(row sums of K_Omega), so (A_N u)(p) = sum_q K[p,q](u(q) - u(p))."""
    Kom = K.omega_block()
    d = np.asarray(Kom.sum(axis=1)).ravel()
    if sps.issparse(Kom):
        return (Kom - sps.diags(d)).tocsr()
    return Kom - np.diag(d)


def solve_neumann(J, lattice, u0, T=1.0, dt=0.01, scheme="rk4", save_every=1):
    K = _kernel_matrix(J, lattice)
    A = neumann_generator(K)
    window = picard_window_bound(J, lattice) if scheme == "picard" else None
    times, vals = solve_linear(A, _initial(u0, lattice), None, T, dt, scheme, save_every,
                               picard_window_length=window)
    return Trajectory(lattice, times, vals, {"problem": "neumann", "scheme": scheme})


# ---------------------------------------------------------------------------
# Rescaled operator


def check_resolution(kernel: KernelSpec, lattice: LatticeDomain, cells=6):
    """At least ``cells`` lattice cells across each support axis of ``kernel``."""
    across_z = 2 * kernel.radius_z / lattice.hz
    across_s = 2 * kernel.radius_s / lattice.hs
    if across_z < cells or across_s < cells:
        raise ResolutionError(f"kernel support spans {across_z:.2f} x {across_s:.2f} cells, "
                              f"need >= {cells} on each axis")


def lattice_moment_factor(Je: KernelSpec, lattice: LatticeDomain):
    """int J x_1^2 divided by its lattice sum around the origin node.

    Multiplying the sampled kernel by this factor makes the discrete operator
    reproduce L exactly on quadratics in z; without it the lattice sum of a
    kernel resolved by a few cells misses the moment by a fixed fraction
    that does not shrink with eps.
    """
    X, Y, S = lattice.coords()
    origin = np.flatnonzero((np.abs(S) < 0.5 * lattice.hs)
                            & np.all(np.abs(X) < 0.5 * lattice.hz, axis=1)
                            & np.all(np.abs(Y) < 0.5 * lattice.hz, axis=1))
    if origin.size != 1 or not lattice.mask[origin[0]]:
        raise ValueError("the lattice needs a node at the origin inside Omega")
    total = 0.0
    for valid, q, wx, wy, sigma in neighbour_blocks(lattice, origin, Je.radius_z, Je.radius_s):
        kq = Je.evaluate(wx, wy, sigma) * lattice.cell_volume
        total += float(np.where(valid, kq * wx[:, 0] ** 2, 0.0).sum())
    return Je.c1 / total


def _lattice_kernel(J, eps, lattice, normalize):
    Je = rescaled_kernel(J, eps)
    check_resolution(Je, lattice)
    if normalize:
        Je = replace(Je, scale=Je.scale * lattice_moment_factor(Je, lattice))
    return Je


def apply_rescaled_operator(J: KernelSpec, eps, v: Field, lattice: LatticeDomain = None,
                            im_sign=1.0, normalize=True) -> Field:
    """eps^{-2} sum_q J^eps(p . q^{-1}) (v(q) - v(p)) h_vol at Omega nodes.

    ``normalize`` applies ``lattice_moment_factor`` to the sampled kernel.
    """
    lattice = v.lattice if lattice is None else lattice
    Je = _lattice_kernel(J, eps, lattice, normalize)
    u = v.full_values()
    rows = lattice.omega_nodes
    up = u[rows]
    vol = lattice.cell_volume
    acc = np.zeros(rows.size, dtype=np.result_type(u, float))
    for valid, q, wx, wy, sigma in neighbour_blocks(lattice, rows, Je.radius_z, Je.radius_s,
                                                     im_sign=im_sign):
        kq = Je.evaluate(wx, wy, sigma) * vol
        acc = acc + np.where(valid, kq * (u[q] - up), 0.0)
    return Field(lattice, acc / eps**2, v.t, on="omega")


def rescaled_generator(J: KernelSpec, eps, lattice: LatticeDomain, normalize=True):
    """(A_Omega, A_exterior) with A = eps^{-2} (K^eps - diag(row sums of K^eps))."""
    Je = _lattice_kernel(J, eps, lattice, normalize)
    K = build_kernel_matrix(Je, lattice, dense=False)
    d = K.row_sums()
    Kom = K.omega_block().tocsr()
    A = (Kom - sps.diags(d)) / eps**2
    return A.tocsr(), K.exterior_block().tocsr() / eps**2


def solve_rescaled_dirichlet(J: KernelSpec, eps, lattice, u0, g=None, T=1.0, dt=None,
                             scheme="rk4", save_every=1, normalize=True):
    """u' = L_eps u on Omega with u = g outside; explicit schemes need dt <= 0.1 eps^2."""
    if dt is None:
        dt = 0.1 * eps**2
        dt = T / math.ceil(T / dt)
    if scheme in ("rk4", "euler") and dt > 0.1 * eps**2 * (1 + 1e-12):
        raise StabilityError(f"dt = {dt:g} exceeds 0.1 eps^2 = {0.1 * eps**2:g}")
    A, Aext = rescaled_generator(J, eps, lattice, normalize)
    if scheme == "exact_expm" and A.shape[0] > DENSE_LIMIT:
        raise ValueError("exact_expm is limited to small lattices")
    b = _boundary_source(Aext, lattice, g)
    times, vals = solve_linear(A, _initial(u0, lattice), b, T, dt, scheme, save_every)
    return Trajectory(lattice, times, vals, {"problem": "rescaled_dirichlet", "eps": eps,
                                             "scheme": scheme, "dt": dt})


# ---------------------------------------------------------------------------
# Comparison


def check_comparison(traj_super: Trajectory, traj_sub: Trajectory):
    """Most negative value of super - sub over all nodes and stored times."""
    if traj_super.values.shape != traj_sub.values.shape or not np.allclose(
            traj_super.times, traj_sub.times, rtol=0, atol=1e-12):
        raise ValueError("trajectories must share lattice and time grid")
    diff = traj_super.values - traj_sub.values
    i, j = np.unravel_index(np.argmin(diff), diff.shape)
    return {"min_difference": float(diff[i, j]), "time": float(traj_super.times[i]),
            "node": int(traj_super.lattice.omega_nodes[j])}
