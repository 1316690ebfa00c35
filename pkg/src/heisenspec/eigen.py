"""Principal Dirichlet eigenvalue and Neumann spectral gap of the nonlocal operator.

For u supported in Omega and int J = 1,

    (1/2) int int J(p . q^{-1}) (u(p) - u(q))^2 dq dp = <(I - K) u, u>_Omega,

so the Dirichlet rate lambda_1 is the bottom of the spectrum of I - K_Omega.
The Neumann gap beta_1 is the second eigenvalue of A_N = diag(d) - K_Omega,
d(p) = sum_{q in Omega} K[p, q], whose kernel is the constants.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .group import Field
from .nonlocal_ import KernelMatrix, Trajectory

__all__ = ["EigenResult", "dirichlet_principal", "neumann_gap", "verify_decay",
           "dirichlet_quotient", "pairwise_quotient", "fit_rate"]


@dataclass
class EigenResult:
    value: float
    vector: Field
    residual: float
    next_value: float = float("nan")

    @property
    def gap(self):
        return self.next_value - self.value

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["value", "residual"])
            w.writerow([repr(self.value), repr(self.residual)])
            w.writerow(["node_id", "eigenfunction"])
            for node, v in zip(self.vector.lattice.omega_nodes, self.vector.values):
                w.writerow([int(node), repr(float(v))])


def _require_symmetric(K: KernelMatrix):
    if not K.symmetric:
        raise ValueError(f"kernel matrix is not symmetric (max asymmetry {K.asymmetry:.3e})")


def _inverse_iteration(A, shift, start, deflate=None, tol=1e-13, max_iter=200):
    """Shifted inverse iteration with one dense LU factorization."""
    m = A.shape[0]
    lu = scipy.linalg.lu_factor(A - shift * np.eye(m))
    x = start / np.linalg.norm(start)
    value = float(x @ A @ x)
    for _ in range(max_iter):
        y = scipy.linalg.lu_solve(lu, x)
        if deflate is not None:
            y -= deflate * (deflate @ y)
        x = y / np.linalg.norm(y)
        new = float(x @ A @ x)
        res = np.linalg.norm(A @ x - new * x)
        if res <= tol * max(1.0, abs(new)):
            return new, x, res
        value = new
    return value, x, float(np.linalg.norm(A @ x - value * x))


def _dense_symmetric(K: KernelMatrix):
    Kom = K.omega_block()
    Kom = Kom.toarray() if hasattr(Kom, "toarray") else np.asarray(Kom)
    # symmetrize away rounding so eigh and the quotient see the same matrix
    return 0.5 * (Kom + Kom.T)


def dirichlet_principal(K: KernelMatrix, lattice=None) -> EigenResult:
    """Smallest eigenvalue of I - K_Omega with its positive eigenfunction."""
    _require_symmetric(K)
    lattice = K.lattice if lattice is None else lattice
    A = np.eye(K.rows.size) - _dense_symmetric(K)
    m = A.shape[0]
    if m == 1:
        return EigenResult(float(A[0, 0]), Field(lattice, np.ones(1), on="omega"), 0.0)
    vals, vecs = scipy.linalg.eigh(A, subset_by_index=[0, 1])
    shift = vals[0] - 0.1 * (vals[1] - vals[0])
    value, x, res = _inverse_iteration(A, shift, vecs[:, 0])
    x = x * np.sign(x.sum()) / np.sqrt(lattice.cell_volume)
    return EigenResult(value, Field(lattice, x, on="omega"), res, float(vals[1]))


def neumann_gap(K: KernelMatrix, lattice=None) -> EigenResult:
    """Second eigenvalue of A_N; the constant mode is deflated."""
    _require_symmetric(K)
    lattice = K.lattice if lattice is None else lattice
    Kom = _dense_symmetric(K)
    A = np.diag(Kom.sum(axis=1)) - Kom
    m = A.shape[0]
    if m < 2:
        raise ValueError("the Neumann gap needs at least two Omega nodes")
    ones = np.ones(m) / np.sqrt(m)
    vals, vecs = scipy.linalg.eigh(A, subset_by_index=[0, min(2, m - 1)])
    # pick the eigenpair least aligned with the constants
    align = np.abs(ones @ vecs)
    idx = [i for i in range(vals.size) if align[i] < 0.5]
    i = idx[0]
    nxt = float(vals[idx[1]]) if len(idx) > 1 else float("nan")
    start = vecs[:, i] - ones * (ones @ vecs[:, i])
    if m == 2:
        value = float(start @ A @ start / (start @ start))
        x = start / np.linalg.norm(start)
        res = float(np.linalg.norm(A @ x - value * x))
    else:
        lower = vals[i] - 0.1 * max(nxt - vals[i], 1e-3) if np.isfinite(nxt) else vals[i] - 1e-3
        value, x, res = _inverse_iteration(A, lower, start, deflate=ones)
    x = x / np.sqrt(lattice.cell_volume)
    return EigenResult(value, Field(lattice, x, on="omega"), res, nxt)


def dirichlet_quotient(K: KernelMatrix, u):
    """(||u||^2 - <K u, u>) / ||u||^2 on Omega: the quotient once int J = 1 is used."""
    Kom = _dense_symmetric(K)
    u = np.asarray(u, dtype=float)
    return float((u @ u - u @ Kom @ u) / (u @ u))


def pairwise_quotient(K: KernelMatrix, u):
    """Literal half double sum of K[p,q](u(p) - u(q))^2 over all lattice pairs, u = 0 off Omega.

    Differs from ``dirichlet_quotient`` by sum_p u(p)^2 (d(p) - 1), where d are
    the full discrete row sums of K, i.e. by the quadrature error of int J.
    """
    lattice = K.lattice
    full = np.zeros(lattice.size)
    full[lattice.mask] = u
    M = K.dense()
    # rows are Omega nodes; pairs with both ends outside Omega contribute 0,
    # pairs with one end outside appear once in M and count twice in the sum
    rows = lattice.omega_nodes
    inside = lattice.mask
    diff2 = (full[rows][:, None] - full[None, :]) ** 2
    total = 0.5 * np.sum(M[:, inside] * diff2[:, inside]) + np.sum(M[:, ~inside] * diff2[:, ~inside])
    return float(total / (u @ u))


def fit_rate(times, norms, tail=0.5):
    """Decay rate from a linear fit of log(norm) over the last ``tail`` fraction of times."""
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    start = int(times.size * (1 - tail))
    t, y = times[start:], norms[start:]
    if t.size < 2 or np.any(y <= 0):
        raise ValueError("not enough positive tail data to fit a rate")
    return float(-np.polyfit(t, np.log(y), 1)[0])


def verify_decay(traj: Trajectory, rate, mode="dirichlet", mass=None, slack=1e-6, tail=0.5):
    """Check ||u(t) - M|| <= e^{-rate t} ||u0 - M|| at every stored time and fit the tail rate.

    For Neumann problems M is the mean value (mass / |Omega|) unless given.
    """
    vals = traj.values
    vol = traj.lattice.cell_volume
    if mode == "neumann":
        if mass is None:
            mean = vals[0].mean()
        else:
            mean = mass / (vals.shape[1] * vol)
        vals = vals - mean
    elif mode != "dirichlet":
        raise ValueError("mode must be 'dirichlet' or 'neumann'")
    norms = np.sqrt(np.sum(vals**2, axis=1) * vol)
    bound = np.exp(-rate * traj.times) * norms[0]
    ratio = norms / np.maximum(bound, 1e-300)
    fitted = fit_rate(traj.times, norms, tail)
    return {
        "bound_holds": bool(np.all(norms <= bound * (1 + slack) + 1e-300)),
        "max_ratio": float(ratio.max()),
        "fitted_rate": fitted,
        "target_rate": float(rate),
        "rate_ratio": fitted / rate if rate else float("nan"),
        "norms": norms,
    }
