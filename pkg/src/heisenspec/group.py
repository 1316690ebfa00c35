"""Heisenberg group arithmetic, box lattices, group convolution and the sub-Laplacian.

Points of H_n are (x, y, s) with x, y in R^n and s real.  The product is

    (z, s) . (w, t) = (z + w, s + t + Im<z, w> / 2),   Im<z, w> = sum_j (y_j u_j - x_j v_j)

for z = x + iy and w = u + iv.  With this law (1,0,0).(0,1,0) = (1,1,-1/2).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .radial import RadialProfile

__all__ = [
    "GroupPoint",
    "group_mul",
    "group_inverse",
    "dilate",
    "imag_form",
    "LatticeDomain",
    "Field",
    "SupportOverflowError",
    "group_convolve",
    "neighbour_blocks",
    "heisenberg_laplacian_apply",
    "radial_laplacian_apply",
]


class SupportOverflowError(ValueError):
    """A kernel neighbourhood of an Omega node leaves the lattice."""


@dataclass(frozen=True)
class GroupPoint:
    x: np.ndarray
    y: np.ndarray
    s: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be vectors of the same length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "s", float(self.s))

    @property
    def n(self):
        return self.x.size

    @classmethod
    def identity(cls, n=1):
        return cls(np.zeros(n), np.zeros(n), 0.0)

    def norm_z(self):
        return math.sqrt(float(np.dot(self.x, self.x) + np.dot(self.y, self.y)))

    def as_tuple(self):
        return (*self.x, *self.y, self.s)

    def __mul__(self, other):
        return group_mul(self, other)


def imag_form(x, y, u, v):
    """Im<z, w> for z = x + iy, w = u + iv, summed over the last axis in index order."""
    x, y, u, v = (np.asarray(a, dtype=float) for a in (x, y, u, v))
    acc = np.zeros(np.broadcast_shapes(x.shape, u.shape)[:-1])
    for j in range(x.shape[-1]):
        acc = acc + (y[..., j] * u[..., j] - x[..., j] * v[..., j])
    return acc


def group_mul(p: GroupPoint, q: GroupPoint) -> GroupPoint:
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: n={p.n} and n={q.n}")
    im = float(imag_form(p.x, p.y, q.x, q.y))
    return GroupPoint(p.x + q.x, p.y + q.y, (p.s + q.s) + 0.5 * im)


def group_inverse(p: GroupPoint) -> GroupPoint:
    return GroupPoint(-p.x, -p.y, -p.s)


def dilate(r, p: GroupPoint) -> GroupPoint:
    """delta_r(z, s) = (sqrt(r) z, r s)."""
    if not r > 0:
        raise ValueError("dilation factor must be positive")
    c = math.sqrt(r)
    return GroupPoint(c * p.x, c * p.y, r * p.s)


# ---------------------------------------------------------------------------
# Lattices


@dataclass(frozen=True, eq=False)
class LatticeDomain:
    """Uniform box lattice in R^{2n+1} with an Omega mask.

    Axes are ordered x_1..x_n, y_1..y_n, s; nodes are numbered in C order so
    the s index runs fastest.  All horizontal axes share the spacing ``hz``,
    the central axis has spacing ``hs``.  Node coordinates are ``lo + i*h``.
    """

    n: int
    hz: float
    hs: float
    shape: tuple
    lo: tuple
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.hz <= 0 or self.hs <= 0:
            raise ValueError("spacing must be positive")
        if len(self.shape) != 2 * self.n + 1 or len(self.lo) != 2 * self.n + 1:
            raise ValueError("shape and lo need 2n+1 entries")
        mask = np.asarray(self.mask, dtype=bool).ravel()
        if mask.size != int(np.prod(self.shape)):
            raise ValueError("mask length does not match node count")
        if not mask.any():
            raise ValueError("Omega mask is empty")
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "shape", tuple(int(m) for m in self.shape))
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))

    @classmethod
    def box(cls, n, hz, hs, omega_z, omega_s, collar_z, collar_s):
        """Lattice symmetric about the origin.

        Omega is the box |x_j|, |y_j| <= omega_z, |s| <= omega_s (rounded to
        nodes); the collar adds ``collar_z`` / ``collar_s`` extra nodes on each side.
        """
        mz = int(math.floor(omega_z / hz + 1e-9))
        ms = int(math.floor(omega_s / hs + 1e-9))
        nz = mz + int(collar_z)
        ns = ms + int(collar_s)
        shape = (2 * nz + 1,) * (2 * n) + (2 * ns + 1,)
        lo = (-nz * hz,) * (2 * n) + (-ns * hs,)
        idx = np.indices(shape).reshape(2 * n + 1, -1)
        inside = np.all(np.abs(idx[: 2 * n] - nz) <= mz, axis=0) & (np.abs(idx[-1] - ns) <= ms)
        return cls(n, hz, hs, shape, lo, inside)

    @classmethod
    def for_kernel(cls, n, hz, hs, omega_z, omega_s, radius_z, radius_s, extra=1):
        """Box lattice whose collar holds the kernel support of every Omega node.

        Besides the support half-widths, the s collar absorbs the shear
        |Im<z_p, z_p - z_q>|/2 <= |z_p| radius_z / 2 of the group translation.
        """
        mz = math.floor(omega_z / hz + 1e-9) * hz
        zmax = math.sqrt(2 * n) * mz
        cz = math.ceil(radius_z / hz) + extra
        cs = math.ceil((radius_s + 0.5 * zmax * radius_z) / hs) + extra
        return cls.box(n, hz, hs, omega_z, omega_s, cz, cs)

    def with_mask(self, mask):
        return LatticeDomain(self.n, self.hz, self.hs, self.shape, self.lo, mask)

    @property
    def dim(self):
        return 2 * self.n + 1

    @property
    def size(self):
        return self.mask.size

    @property
    def spacing(self):
        return (self.hz,) * (2 * self.n) + (self.hs,)

    @property
    def cell_volume(self):
        return self.hz ** (2 * self.n) * self.hs

    @property
    def omega_nodes(self):
        return np.flatnonzero(self.mask)

    @property
    def n_omega(self):
        return int(self.mask.sum())

    def axis(self, a):
        return self.lo[a] + np.arange(self.shape[a]) * self.spacing[a]

    def multi_index(self, nodes=None):
        nodes = np.arange(self.size) if nodes is None else np.asarray(nodes)
        return np.stack(np.unravel_index(nodes, self.shape), axis=-1)

    def coords(self):
        """(X, Y, S): arrays of shape (N, n), (N, n), (N,)."""
        cached = self.__dict__.get("_coords")
        if cached is not None:
            return cached
        idx = self.multi_index()
        h = np.array(self.spacing)
        pts = np.array(self.lo) + idx * h
        out = (pts[:, : self.n].copy(), pts[:, self.n: 2 * self.n].copy(), pts[:, -1].copy())
        object.__setattr__(self, "_coords", out)
        return out

    def point(self, node):
        X, Y, S = self.coords()
        return GroupPoint(X[node], Y[node], S[node])

    def sample(self, func):
        """Evaluate ``func(X, Y, S)`` at every node; X, Y have shape (N, n)."""
        X, Y, S = self.coords()
        return np.asarray(func(X, Y, S))

    def field(self, func, t=0.0):
        return Field(self, self.sample(func), t)

    def header(self):
        return {
            "n": self.n,
            "hz": self.hz,
            "hs": self.hs,
            "shape": "x".join(str(m) for m in self.shape),
            "lo": " ".join(repr(v) for v in self.lo),
        }


@dataclass
class Field:
    """Values on the nodes of a lattice at time t.

    ``on`` is "all" when values cover every lattice node and "omega" when
    they cover only the Omega nodes (in node order).
    """

    lattice: LatticeDomain
    values: np.ndarray
    t: float = 0.0
    on: str = "all"

    def __post_init__(self):
        self.values = np.asarray(self.values)
        expected = self.lattice.size if self.on == "all" else self.lattice.n_omega
        if self.values.shape != (expected,):
            raise ValueError(f"field has {self.values.shape} values, lattice expects {expected}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")
        if self.t < 0:
            raise ValueError("time must be nonnegative")

    def omega_values(self):
        if self.on == "omega":
            return self.values
        return self.values[self.lattice.mask]

    def full_values(self, exterior=0.0):
        if self.on == "all":
            return self.values
        out = np.full(self.lattice.size, exterior, dtype=self.values.dtype)
        out[self.lattice.mask] = self.values
        return out


# ---------------------------------------------------------------------------
# Group convolution


def neighbour_blocks(lattice: LatticeDomain, rows, radius_z, radius_s, check=True, im_sign=1.0):
    """Enumerate the group-translate neighbours of ``rows`` in fixed order.

    Yields ``(valid, q, wx, wy, sigma)`` per candidate slot: ``q`` are column
    nodes, (wx, wy, sigma) the coordinates of p . q^{-1}, and ``valid`` marks
    slots whose q lies on the lattice.  For each row the candidate columns come
    in strictly increasing node order, so sequential accumulation over the
    blocks reproduces a plain loop over all q.  ``im_sign=-1`` flips the
    sign of the symplectic term (only used for negative controls).
    """
    n, hz, hs = lattice.n, lattice.hz, lattice.hs
    rows = np.asarray(rows)
    X, Y, S = lattice.coords()
    idx = lattice.multi_index(rows)
    shape = np.array(lattice.shape)
    strides = np.array([int(np.prod(shape[a + 1:])) for a in range(lattice.dim)])
    xp, yp, sp = X[rows], Y[rows], S[rows]
    ns = shape[-1]
    s_lo = lattice.lo[-1]
    mz = int(math.floor(radius_z / hz + 1e-9))
    width = int(math.floor(2 * radius_s / hs + 1e-9)) + 2
    for d in itertools.product(range(-mz, mz + 1), repeat=2 * n):
        d = np.array(d)
        if float(np.sum((d * hz) ** 2)) >= radius_z**2:
            continue
        qz = idx[:, : 2 * n] + d
        zin = np.all((qz >= 0) & (qz < shape[: 2 * n]), axis=1)
        if check and not zin.all():
            raise SupportOverflowError("kernel support leaves the lattice in a horizontal direction")
        base = np.where(zin, (qz * strides[: 2 * n]).sum(axis=1), 0)
        xq, yq = X[base], Y[base]
        im = imag_form(xp, yp, xq, yq)
        half = 0.5 * im if im_sign > 0 else -0.5 * im
        wx, wy = xp - xq, yp - yq
        centre = sp - half
        first = np.ceil((centre - radius_s - s_lo) / hs - 1e-9).astype(np.int64)
        for j in range(width):
            qs = first + j
            sin = (qs >= 0) & (qs < ns)
            if check:
                cand = s_lo + qs * hs
                near = np.abs(centre - cand) < radius_s
                if np.any(zin & near & ~sin):
                    raise SupportOverflowError("kernel support leaves the lattice in the s direction")
            valid = zin & sin
            q = base + np.where(sin, qs, 0)
            sigma = (sp - S[q]) - half
            yield valid, q, wx, wy, sigma


def group_convolve(f: Field, kernel, lattice: LatticeDomain = None, rows=None) -> Field:
    """Left convolution (J * u)(p) = sum_q J(p . q^{-1}) u(q) h_vol at Omega nodes.

    ``kernel`` needs ``evaluate(x, y, s)`` and ``radius_z``/``radius_s``.
    Exterior nodes contribute the field's own values there.  ``rows`` may
    restrict the output to a subset of nodes; the result is then a plain array.
    """
    lattice = f.lattice if lattice is None else lattice
    u = f.full_values()
    subset = rows is not None
    rows = lattice.omega_nodes if rows is None else np.asarray(rows)
    vol = lattice.cell_volume
    acc = np.zeros(rows.size, dtype=np.result_type(u, float))
    for valid, q, wx, wy, sigma in neighbour_blocks(lattice, rows, kernel.radius_z, kernel.radius_s):
        kq = kernel.evaluate(wx, wy, sigma) * vol
        acc = acc + np.where(valid, kq * u[q], 0.0)
    if subset:
        return acc
    return Field(lattice, acc, f.t, on="omega")


# ---------------------------------------------------------------------------
# Sub-Laplacian


def heisenberg_laplacian_apply(v: Field, lattice: LatticeDomain = None) -> Field:
    """Centered-difference L v at Omega nodes.

    L = sum_j (d2/dx_j^2 + d2/dy_j^2) + (|z|^2/4) d2/ds^2 + d/ds sum_j (x_j d/dy_j - y_j d/dx_j).
    The mixed term composes centered first differences, coefficients at the node.
    """
    lattice = v.lattice if lattice is None else lattice
    n, hz, hs = lattice.n, lattice.hz, lattice.hs
    V = v.full_values().reshape(lattice.shape)
    idx = lattice.multi_index(lattice.omega_nodes)
    if np.any(idx == 0) or np.any(idx == np.array(lattice.shape) - 1):
        raise ValueError("finite-difference stencil exits the lattice at an Omega node")
    X, Y, S = lattice.coords()
    rows = lattice.omega_nodes
    xs, ys = X[rows], Y[rows]
    dim = lattice.dim

    def at(offsets):
        shifted = idx.copy()
        for a, o in offsets:
            shifted[:, a] += o
        return V[tuple(shifted.T)]

    centre = at([])
    out = np.zeros(rows.size, dtype=V.dtype)
    for a in range(2 * n):
        out += (at([(a, 1)]) - 2 * centre + at([(a, -1)])) / hz**2
    r2 = np.sum(xs**2 + ys**2, axis=1)
    sa = dim - 1
    out += 0.25 * r2 * (at([(sa, 1)]) - 2 * centre + at([(sa, -1)])) / hs**2

    def dsd(a):
        return (at([(sa, 1), (a, 1)]) - at([(sa, 1), (a, -1)])
                - at([(sa, -1), (a, 1)]) + at([(sa, -1), (a, -1)])) / (4 * hz * hs)

    for j in range(n):
        out += xs[:, j] * dsd(n + j) - ys[:, j] * dsd(j)
    return Field(lattice, out, v.t, on="omega")


def radial_laplacian_apply(f: RadialProfile) -> RadialProfile:
    """d2/dr2 + ((2n-1)/r) d/dr + (r^2/4) d2/ds2 by centered differences.

    Requires a uniform r grid.  A node at r = 0 uses the even reflection
    f(-h) = f(h) and the limit ((2n-1)/r) f_r -> (2n-1) f_rr.  The result
    lives on the interior skeleton: every r node but the last, s nodes
    without the two ends.
    """
    r, s, F = f.r, f.s, f.values
    hr, hs = f.dr, f.ds
    n = f.n
    ext_lo = F[1] if r[0] == 0 else _reflect_first(f)
    Fe = np.vstack([ext_lo[None, :], F])
    inner = Fe[1:-1, 1:-1]
    frr = (Fe[2:, 1:-1] - 2 * inner + Fe[:-2, 1:-1]) / hr**2
    fr = (Fe[2:, 1:-1] - Fe[:-2, 1:-1]) / (2 * hr)
    fss = (F[:-1, 2:] - 2 * inner + F[:-1, :-2]) / hs**2
    rr = r[:-1, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        drift = np.where(rr > 0, (2 * n - 1) / np.where(rr > 0, rr, 1.0) * fr, (2 * n - 1) * frr)
    out = frr + drift + 0.25 * rr**2 * fss
    return RadialProfile(n, r[:-1], s[1:-1], out, f.tail_tol)


def _reflect_first(f: RadialProfile):
    # Smallest node r0 > 0: the reflected neighbour sits at -r0, spacing 2 r0,
    # which is only a centered stencil when r0 = h/2.
    hr = f.dr
    if not math.isclose(f.r[0], hr / 2, rel_tol=1e-9):
        raise ValueError("positive smallest r node must equal h/2 for the even reflection")
    return f.values[0]
