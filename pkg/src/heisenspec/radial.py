"""Radial (U(n)-invariant) functions sampled on an (r, s) half-plane grid."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["RadialProfile", "sphere_area", "profile_grid"]


def sphere_area(n):
    """Area of the unit sphere in R^{2n}: 2 pi^n / (n-1)!."""
    return 2.0 * math.pi**n / math.factorial(n - 1)


@dataclass
class RadialProfile:
    """Samples f(|z|, s) on a tensor grid of r nodes (ascending, r >= 0) and s nodes.

    ``values`` has shape (len(r), len(s)).  ``tail_tol`` is the magnitude the
    samples on the outer r edge and both s edges are expected to stay under.
    """

    n: int
    r: np.ndarray
    s: np.ndarray
    values: np.ndarray
    tail_tol: float = 1e-8
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.s = np.asarray(self.s, dtype=float)
        self.values = np.asarray(self.values)
        if self.values.shape != (self.r.size, self.s.size):
            raise ValueError(f"values shape {self.values.shape} does not match grid "
                             f"({self.r.size}, {self.s.size})")
        if np.any(self.r < 0) or np.any(np.diff(self.r) <= 0) or np.any(np.diff(self.s) <= 0):
            raise ValueError("r must be nonnegative and both axes strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("profile values must be finite")

    @classmethod
    def from_function(cls, func, n=1, r_max=8.0, s_max=12.0, n_r=256, n_s=256, tail_tol=1e-8):
        """Sample ``func(r, s)`` on a uniform grid r in [0, r_max], s in [-s_max, s_max]."""
        r, s = profile_grid(r_max, s_max, n_r, n_s)
        R, S = np.meshgrid(r, s, indexing="ij")
        return cls(n, r, s, func(R, S), tail_tol)

    @property
    def is_real(self):
        return not np.iscomplexobj(self.values) or not np.any(self.values.imag)

    @property
    def dr(self):
        return self.r[1] - self.r[0]

    @property
    def ds(self):
        return self.s[1] - self.s[0]

    def skeleton(self):
        """Same grid, zero values: a target for inverse transforms."""
        return RadialProfile(self.n, self.r, self.s, np.zeros_like(self.values, dtype=float), self.tail_tol)

    def dilated(self, t):
        """Grid mapped by the dilation (r, s) -> (sqrt(t) r, t s); values unchanged."""
        return RadialProfile(self.n, math.sqrt(t) * self.r, t * self.s, self.values, self.tail_tol)

    def with_values(self, values):
        return RadialProfile(self.n, self.r, self.s, values, self.tail_tol)

    def edge_max(self):
        v = np.abs(self.values)
        return float(max(v[-1, :].max(), v[:, 0].max(), v[:, -1].max()))

    def tail_ok(self):
        return self.edge_max() <= self.tail_tol

    def volume_weights(self):
        """Trapezoid weights for integrals over H_n in (r, s) coordinates."""
        wr = _trapezoid_weights(self.r) * self.r ** (2 * self.n - 1)
        ws = _trapezoid_weights(self.s)
        return sphere_area(self.n) * np.outer(wr, ws)

    def lp_norm(self, p):
        """L^p(H_n) norm with the volume element omega_{2n-1} r^{2n-1} dr ds."""
        a = np.abs(self.values)
        top = float(a.max())
        if np.isinf(p) or top == 0.0:
            return top
        # factor out the maximum so large p does not underflow
        return top * float(np.sum(self.volume_weights() * (a / top) ** p) ** (1.0 / p))

    def sup_norm(self):
        return float(np.abs(self.values).max())


def _trapezoid_weights(x):
    w = np.empty_like(x)
    d = np.diff(x)
    w[0] = d[0] / 2
    w[-1] = d[-1] / 2
    w[1:-1] = (d[:-1] + d[1:]) / 2
    return w


def profile_grid(r_max, s_max, n_r, n_s):
    """Uniform r nodes on [0, r_max] and s nodes on [-s_max, s_max]."""
    return np.linspace(0.0, r_max, n_r), np.linspace(-s_max, s_max, n_s)
