"""Spherical transform of U(n)-invariant functions on H_n and its inverse.

Forward:

    fh(lam, k) = omega_{2n-1} int int f(r, s) e^{-i lam s} psi_k(|lam| r^2 / 2) r^{2n-1} dr ds

with psi_k(x) = Lt_k^{n-1}(x) e^{-x/2}.  Inverse:

    f(r, s) = (2 pi)^{-(n+1)} sum_k binom(k+n-1, k) int fh(lam, k) phi_{lam,k}(r, s) |lam|^n dlam.

The spectrum is truncated to the fan |lam| (2k + n) <= mu_max, so each lambda
node carries its own range of k.  Coefficients are stored flat, node by node,
with ``offsets`` marking where each node's k-run starts.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .radial import RadialProfile, sphere_area

__all__ = [
    "SpectralGrid",
    "SpectralCoefficients",
    "default_grid",
    "forward",
    "inverse",
    "sigma_norm",
    "roundtrip_error",
    "convolution_multiplier_check",
    "TailWarning",
]

_LOG_BIG = math.log(1e150)


class TailWarning(UserWarning):
    """Profile samples at the grid edge exceed the declared tail tolerance."""


# ---------------------------------------------------------------------------
# Grid


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Quadrature nodes on the Heisenberg fan.

    ``lam`` are sorted nodes symmetric about 0, ``weights`` include the
    Plancherel density |lam|^n, and node i carries k = 0 .. counts[i]-1.
    """

    n: int
    lam: np.ndarray
    weights: np.ndarray
    counts: np.ndarray
    mu_max: float = float("inf")
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        if np.any(lam == 0) or np.any(np.diff(lam) <= 0):
            raise ValueError("lambda nodes must be nonzero and strictly increasing")
        if not np.allclose(lam, -lam[::-1], rtol=0, atol=1e-14 * np.abs(lam).max()):
            raise ValueError("lambda nodes must be symmetric about 0")
        if np.any(np.asarray(self.weights) <= 0):
            raise ValueError("weights must be positive")
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != lam.shape or np.any(counts < 1):
            raise ValueError("every node needs at least one k")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "counts", counts)

    @classmethod
    def softplus(cls, n=1, lam_min=1e-2, lam_max=40.0, dtau=0.1, dlam_far=0.25,
                 mu_max=80.0, k_max=None, wedge=True):
        """Nodes lam = a log(1 + e^tau) on a uniform tau grid, a = dlam_far / dtau.

        Spacing is geometric (ratio e^dtau) for lam << a and tends to dlam_far
        for lam >> a.  The interval (0, lam_min) is folded into the first
        weight as lam_min^{n+1}: the k-summed integrand is flat there, and
        its density |lam|^n dlam summed over the fan gives that mass.
        """
        if not 0 < lam_min < lam_max:
            raise ValueError("need 0 < lam_min < lam_max")
        a = dlam_far / dtau
        t0 = math.log(math.expm1(lam_min / a))
        t1 = math.log(math.expm1(lam_max / a))
        tau = t0 + dtau * np.arange(int(math.floor((t1 - t0) / dtau + 1e-9)) + 1)
        lp = a * np.log1p(np.exp(tau))
        dl = a / (1.0 + np.exp(-tau))
        w = dl * dtau * lp**n
        w[0] *= 0.5
        w[-1] *= 0.5
        if wedge:
            w[0] += lp[0] ** (n + 1)
        counts = np.ceil((mu_max / lp - n) / 2.0).astype(np.int64) + 1
        counts = np.maximum(counts, 1)
        if k_max is not None:
            counts = np.minimum(counts, k_max + 1)
        params = dict(lam_min=lam_min, lam_max=lam_max, dtau=dtau, dlam_far=dlam_far,
                      mu_max=mu_max, k_max=k_max, wedge=wedge)
        return cls(n, np.concatenate([-lp[::-1], lp]), np.concatenate([w[::-1], w]),
                   np.concatenate([counts[::-1], counts]), float(mu_max), params)

    @property
    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.counts)])

    @property
    def size(self):
        return int(self.counts.sum())

    @property
    def k_max(self):
        return int(self.counts.max()) - 1

    def flat_lambda(self):
        return np.repeat(self.lam, self.counts)

    def flat_k(self):
        off = self.offsets
        return np.arange(self.size) - np.repeat(off[:-1], self.counts)

    def flat_weights(self):
        return np.repeat(self.weights, self.counts)

    def flat_mu(self):
        """|lam| (2k + n) for every stored coefficient."""
        return np.abs(self.flat_lambda()) * (2 * self.flat_k() + self.n)

    def scaled(self, c):
        """Nodes c * lam with the same k ranges; weights scale by c^{n+1}."""
        if c <= 0:
            raise ValueError("scale must be positive")
        params = dict(self.params, scale=c * self.params.get("scale", 1.0))
        return SpectralGrid(self.n, c * self.lam, c ** (self.n + 1) * self.weights,
                            self.counts, c * self.mu_max, params)

    def same_as(self, other):
        return (self is other) or (
            self.n == other.n and np.array_equal(self.lam, other.lam)
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.weights, other.weights))


def default_grid(n=1, **overrides):
    """Grid used by the acceptance runs: lam in [1e-2, 40], fan mu <= 80."""
    return SpectralGrid.softplus(n=n, **overrides)


@dataclass
class SpectralCoefficients:
    grid: SpectralGrid
    values: np.ndarray
    from_real: bool = False
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.size,):
            raise ValueError("coefficient count does not match grid")

    def at(self, i, k):
        """Coefficient at lambda node i and Laguerre index k."""
        if not 0 <= k < self.grid.counts[i]:
            raise IndexError("k outside the stored range for this node")
        return self.values[self.grid.offsets[i] + k]

    def node_values(self, i):
        off = self.grid.offsets
        return self.values[off[i]:off[i + 1]]

    def with_values(self, values, from_real=None):
        return SpectralCoefficients(self.grid, values, self.from_real if from_real is None else from_real)

    def __add__(self, other):
        _require_same_grid(self, other)
        return self.with_values(self.values + other.values, self.from_real and other.from_real)

    def __sub__(self, other):
        _require_same_grid(self, other)
        return self.with_values(self.values - other.values, self.from_real and other.from_real)

    def __mul__(self, other):
        if isinstance(other, SpectralCoefficients):
            _require_same_grid(self, other)
            return self.with_values(self.values * other.values, self.from_real and other.from_real)
        return self.with_values(self.values * other, self.from_real and np.isrealobj(other))

    __rmul__ = __mul__


def _require_same_grid(a, b):
    if not a.grid.same_as(b.grid):
        raise ValueError("coefficients live on different spectral grids")


# ---------------------------------------------------------------------------
# Laguerre-function loops


@numba.njit(cache=True)
def _forward_sum(lam, offsets, r, alpha, G, out):
    # out[off_i + k] += sum_j G[i, j] psi_k(|lam_i| r_j^2 / 2)
    for i in range(lam.shape[0]):
        a = abs(lam[i])
        kk = offsets[i + 1] - offsets[i]
        base = offsets[i]
        for j in range(r.shape[0]):
            g = G[i, j]
            if g == 0:
                continue
            x = 0.5 * a * r[j] * r[j]
            prev = 0.0
            cur = 1.0
            sc = -0.5 * x
            for k in range(kk):
                if sc > -700.0:
                    out[base + k] += g * (cur * math.exp(sc))
                nxt = ((2 * k + 1 + alpha - x) * cur - k * prev) / (k + 1 + alpha)
                prev = cur
                cur = nxt
                if abs(cur) > 1e150:
                    cur *= 1e-150
                    prev *= 1e-150
                    sc += _LOG_BIG
    return out


@numba.njit(cache=True)
def _inverse_sum(lam, offsets, r, alpha, C, U):
    # U[i, j] = sum_k C[off_i + k] binom(k+alpha, k) psi_k(|lam_i| r_j^2 / 2)
    for i in range(lam.shape[0]):
        a = abs(lam[i])
        kk = offsets[i + 1] - offsets[i]
        base = offsets[i]
        for j in range(r.shape[0]):
            x = 0.5 * a * r[j] * r[j]
            prev = 0.0
            cur = 1.0
            sc = -0.5 * x
            binom = 1.0
            acc = 0.0 + 0.0j
            for k in range(kk):
                if sc > -700.0:
                    acc += C[base + k] * (binom * cur * math.exp(sc))
                nxt = ((2 * k + 1 + alpha - x) * cur - k * prev) / (k + 1 + alpha)
                prev = cur
                cur = nxt
                binom *= (k + 1 + alpha) / (k + 1)
                if abs(cur) > 1e150:
                    cur *= 1e-150
                    prev *= 1e-150
                    sc += _LOG_BIG
            U[i, j] = acc
    return U


def _trapezoid(x):
    w = np.full(x.size, x[1] - x[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _is_uniform(x):
    d = np.diff(x)
    return np.allclose(d, d[0], rtol=1e-10, atol=0)


# ---------------------------------------------------------------------------
# Transforms


def forward(f: RadialProfile, grid: SpectralGrid, endpoint_correction=True) -> SpectralCoefficients:
    """Spherical transform by trapezoid quadrature in s and r.

    With r nodes starting at 0 the r-trapezoid gets its Euler-Maclaurin
    endpoint terms, which matter because the integrand behaves like
    r^{2n-1} near the origin.
    """
    if f.n != grid.n:
        raise ValueError("profile and grid have different n")
    n = f.n
    r, s = f.r, f.s
    if not (_is_uniform(r) and _is_uniform(s)):
        raise ValueError("forward needs uniform r and s nodes")
    diagnostics = {"edge_max": f.edge_max(), "tail_tol": f.tail_tol}
    if not f.tail_ok():
        warnings.warn(f"profile edge value {f.edge_max():.3e} exceeds tail tolerance "
                      f"{f.tail_tol:.1e}", TailWarning, stacklevel=2)
    lam = grid.lam
    F = np.exp(-1j * np.outer(lam, s)) @ (f.values * _trapezoid(s)).T
    G = np.ascontiguousarray(F * (_trapezoid(r) * r ** (2 * n - 1))[None, :])
    out = np.zeros(grid.size, dtype=complex)
    offsets = grid.offsets
    _forward_sum(lam, offsets, r, float(n - 1), G, out)
    if endpoint_correction and r[0] == 0.0 and r.size >= 3:
        h = r[1] - r[0]
        f0 = F[:, 0]
        f1 = (16.0 * F[:, 1] - F[:, 2] - 15.0 * F[:, 0]) / (12.0 * h * h)
        b0 = _bernoulli(2 * n) / (2 * n) * h ** (2 * n)
        b1 = _bernoulli(2 * n + 2) / (2 * n + 2) * h ** (2 * n + 2)
        mu = grid.flat_mu()
        psi1 = -mu / (4.0 * n)
        rep0 = np.repeat(f0, grid.counts)
        rep1 = np.repeat(f1, grid.counts)
        out += b0 * rep0 + b1 * (rep1 + rep0 * psi1)
        diagnostics["endpoint_correction"] = True
    out *= sphere_area(n)
    return SpectralCoefficients(grid, out, from_real=f.is_real, diagnostics=diagnostics)


def _bernoulli(m):
    return {2: 1 / 6, 4: -1 / 30, 6: 1 / 42, 8: -1 / 30, 10: 5 / 66, 12: -691 / 2730}[m]


def inverse(c: SpectralCoefficients, skeleton: RadialProfile, real=None) -> RadialProfile:
    """Evaluate the inversion sum at every (r, s) node of ``skeleton``."""
    grid = c.grid
    if skeleton.n != grid.n:
        raise ValueError("skeleton and grid have different n")
    n = grid.n
    U = np.zeros((grid.lam.size, skeleton.r.size), dtype=complex)
    _inverse_sum(grid.lam, grid.offsets, skeleton.r, float(n - 1), c.values, U)
    out = (U * grid.weights[:, None]).T @ np.exp(1j * np.outer(grid.lam, skeleton.s))
    out /= (2.0 * math.pi) ** (n + 1)
    real = c.from_real if real is None else real
    if real:
        out = out.real
    return RadialProfile(n, skeleton.r, skeleton.s, out, skeleton.tail_tol)


def sigma_norm(c: SpectralCoefficients) -> float:
    """sum_k int |g(lam, k)| |lam|^n dlam with the grid weights."""
    return float(np.sum(np.abs(c.values) * c.grid.flat_weights()))


def roundtrip_error(f: RadialProfile, grid: SpectralGrid) -> float:
    """Relative sup error of inverse(forward(f)) on f's own grid."""
    back = inverse(forward(f, grid), f.skeleton())
    return float(np.abs(back.values - f.values).max() / np.abs(f.values).max())


def convolution_multiplier_check(f, kernel, grid: SpectralGrid, h=0.1, extent_z=4.0, extent_s=5.0,
                                 profile_n=(321, 401)):
    """max |(J*f)^ - Jh fh| over the grid, normalized by max |fh|.

    ``f`` is a radial function f(r, s); ``kernel`` a KernelSpec.  J*f is
    computed with the lattice group convolution on the half line y = 0,
    x >= 0 of a box lattice of spacing h, giving a radial profile on
    r in [0, extent_z], s in [-extent_s, extent_s].  fh and Jh are transforms of
    finely sampled profiles.  Returns (discrepancy, max |fh|).
    """
    from .group import Field, LatticeDomain, group_convolve

    n = grid.n
    if n != 1:
        raise ValueError("the lattice diagnostic is implemented for n = 1")
    lat = LatticeDomain.for_kernel(1, h, h, extent_z, extent_s, kernel.radius_z, kernel.radius_s)
    X, Y, S = lat.coords()
    vals = f(np.sqrt(X[:, 0] ** 2 + Y[:, 0] ** 2), S)
    field_ = Field(lat, vals)
    idx = lat.multi_index()
    mz = int(round(-lat.lo[0] / h))
    ms_om = int(math.floor(extent_s / h + 1e-9))
    ms = int(round(-lat.lo[-1] / h))
    sel = ((idx[:, 1] == mz) & (idx[:, 0] >= mz) & (idx[:, 0] - mz <= int(round(extent_z / h)))
           & (np.abs(idx[:, 2] - ms) <= ms_om))
    rows = np.flatnonzero(sel)
    conv = group_convolve(field_, kernel, lat, rows=rows)
    ri = idx[rows, 0] - mz
    si = idx[rows, 2] - ms + ms_om
    prof = np.zeros((ri.max() + 1, 2 * ms_om + 1))
    prof[ri, si] = conv
    r_nodes = np.arange(ri.max() + 1) * h
    s_nodes = (np.arange(2 * ms_om + 1) - ms_om) * h
    conv_prof = RadialProfile(1, r_nodes, s_nodes, prof, tail_tol=np.inf)
    nr, ns = profile_n
    f_prof = RadialProfile.from_function(f, 1, extent_z, extent_s, nr, ns, tail_tol=np.inf)
    j_prof = RadialProfile.from_function(
        lambda r, s: kernel.evaluate_radial(r, s), 1, kernel.radius_z, kernel.radius_s, nr, ns,
        tail_tol=np.inf)
    fh = forward(f_prof, grid)
    jh = forward(j_prof, grid)
    ch = forward(conv_prof, grid)
    scale = float(np.abs(fh.values).max())
    return float(np.abs(ch.values - jh.values * fh.values).max()), scale
