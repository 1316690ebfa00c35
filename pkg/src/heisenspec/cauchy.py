"""Spectral solution of the Cauchy problems u_t = J*u - u and v_t = L v on H_n.

In transform space the nonlocal evolution multiplies by e^{(Jh - 1) t} and the
heat flow by e^{-|lam|(2k+n) t}.  Large-time quantities are computed on the
dilated frame: with delta_t(z, s) = (sqrt(t) z, t s),

    t^{n+1} u(delta_t(z, s), t) = inverse of  lam -> uh(lam / t, k, t)

so each time uses the spectral grid shrunk by 1/t and the same (r, s)
skeleton, which keeps the resolution matched to the spreading solution.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .radial import RadialProfile
from .transform import SpectralCoefficients, SpectralGrid, forward, inverse

__all__ = [
    "SpectralMultiplier",
    "example_kernel_symbol",
    "example_kernel_spectral",
    "evolve_spectral",
    "fundamental_solution_split",
    "fit_loglog_slope",
    "DecayTable",
    "rescaled_solution",
    "sup_norm_decay",
    "lp_decay",
    "zero_frequency_limit",
    "asymptotic_profile",
    "profile_convergence",
    "nonlocal_heat_gap",
    "smooth_part_decay",
]


def example_kernel_symbol(mu):
    """Jh = e^{-mu}, mu = |lam| (2k + n): the heat kernel at time 1."""
    return np.exp(-np.asarray(mu, dtype=float))


def example_kernel_spectral(grid: SpectralGrid) -> SpectralCoefficients:
    mu = grid.flat_mu()
    c = SpectralCoefficients(grid, example_kernel_symbol(mu), from_real=True)
    c.diagnostics.update(real=True, bounded_by_one=True, below_one_off_axis=bool(np.all(mu > 0)))
    return c


@dataclass(frozen=True)
class SpectralMultiplier:
    """Either the nonlocal multiplier e^{(Jh - 1) t} or the heat multiplier e^{-mu t}.

    For the nonlocal kind ``jhat`` is a function of mu = |lam|(2k+n) (so it
    can be evaluated on any grid) or SpectralCoefficients on a fixed grid.
    """

    kind: str
    jhat: object = None

    def __post_init__(self):
        if self.kind not in ("nonlocal", "heat"):
            raise ValueError(f"unknown multiplier kind {self.kind!r}")
        if self.kind == "nonlocal" and self.jhat is None:
            raise ValueError("nonlocal multiplier needs jhat")

    @classmethod
    def heat(cls):
        return cls("heat")

    @classmethod
    def nonlocal_(cls, jhat=example_kernel_symbol):
        return cls("nonlocal", jhat)

    def symbol_on(self, grid: SpectralGrid):
        if isinstance(self.jhat, SpectralCoefficients):
            if not self.jhat.grid.same_as(grid):
                raise ValueError("kernel coefficients live on a different grid")
            return self.jhat.values
        return np.asarray(self.jhat(grid.flat_mu()), dtype=complex)

    def on(self, grid: SpectralGrid, t):
        if t < 0:
            raise ValueError("time must be nonnegative")
        if self.kind == "heat":
            return np.exp(-grid.flat_mu() * t)
        jh = self.symbol_on(grid)
        out = np.exp((jh - 1.0) * t)
        return out.real if np.isrealobj(jh) or not np.any(jh.imag) else out


def evolve_spectral(u0: SpectralCoefficients, m: SpectralMultiplier, t) -> SpectralCoefficients:
    """uh(t) = m(t) uh0, pointwise on the grid."""
    mult = m.on(u0.grid, t)
    real_mult = np.isrealobj(mult)
    return u0.with_values(u0.values * mult, u0.from_real and real_mult)


def fundamental_solution_split(jhat: SpectralCoefficients, t):
    """e^{(Jh-1)t} = e^{-t} + e^{-t}(e^{Jh t} - 1): Dirac mass plus an L1(Sigma) part."""
    if not t > 0:
        raise ValueError("t must be positive")
    atom = math.exp(-t)
    smooth = atom * np.expm1(jhat.values * t)
    return atom, jhat.with_values(smooth)


def smooth_part_decay(grid: SpectralGrid, times, jhat=example_kernel_symbol):
    """sigma_norm of the smooth part for each t, each evaluated on grid / t.

    Scaling the grid by 1/t keeps the region mu t = O(1), where the smooth
    part lives, resolved for every t.
    """
    from .transform import sigma_norm

    out = []
    for t in times:
        g = grid.scaled(1.0 / t)
        jh = SpectralCoefficients(g, jhat(g.flat_mu()), from_real=True)
        out.append(sigma_norm(fundamental_solution_split(jh, t)[1]))
    return np.array(out)


def fit_loglog_slope(t, y):
    """Least-squares slope of log y against log t (needs >= 5 points)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size < 5:
        raise ValueError("slope fits need at least 5 points")
    if np.any(y <= 0):
        raise ValueError("slope fits need positive data")
    return float(np.polyfit(np.log(t), np.log(y), 1)[0])


@dataclass
class DecayTable:
    times: np.ndarray
    norms: np.ndarray
    scaled: np.ndarray
    slope: float
    label: str = "norm"
    extra: dict = field(default_factory=dict)

    def rows(self):
        return list(zip(self.times, self.norms, self.scaled))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", self.label, "scaled_" + self.label])
            for row in self.rows():
                w.writerow([repr(float(v)) for v in row])
            w.writerow(["fitted_slope", repr(self.slope), ""])


def rescaled_solution(u0: RadialProfile, m: SpectralMultiplier, t, grid: SpectralGrid,
                      skeleton: RadialProfile = None) -> RadialProfile:
    """t^{n+1} u(delta_t(r, s), t) on ``skeleton`` (default: u0's own grid)."""
    skeleton = u0.skeleton() if skeleton is None else skeleton
    coef = rescaled_coefficients(u0, m, t, grid)
    return inverse(coef, skeleton)


def rescaled_coefficients(u0: RadialProfile, m: SpectralMultiplier, t, grid: SpectralGrid):
    """Coefficients of t^{n+1} delta_t u(t), stored on ``grid``."""
    if t <= 0:
        raise ValueError("t must be positive")
    g_t = grid.scaled(1.0 / t)
    ut = evolve_spectral(forward(u0, g_t), m, t)
    return SpectralCoefficients(grid, ut.values, from_real=ut.from_real)


def _norm_table(u0, m, times, grid, p, skeleton, label):
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be increasing")
    n = u0.n
    skeleton = u0.skeleton() if skeleton is None else skeleton
    norms = []
    for t in times:
        prof = rescaled_solution(u0, m, t, grid, skeleton)
        # undo the t^{n+1} factor and move to the dilated grid
        u = prof.dilated(t).with_values(prof.values / t ** (n + 1))
        norms.append(u.lp_norm(p))
    norms = np.array(norms)
    expo = (n + 1) if np.isinf(p) else (n + 1) * (1.0 - 1.0 / p)
    scaled = norms * times**expo
    slope = fit_loglog_slope(times, norms) if np.all(norms > 0) and times.size >= 5 else float("nan")
    return DecayTable(times, norms, scaled, slope, label, {"p": p, "exponent": expo})


def sup_norm_decay(u0: RadialProfile, m: SpectralMultiplier, times, grid: SpectralGrid,
                   skeleton=None) -> DecayTable:
    """(t, ||u(t)||_inf, t^{n+1} ||u(t)||_inf) with a fitted log-log slope."""
    return _norm_table(u0, m, times, grid, np.inf, skeleton, "sup_norm")


def lp_decay(u0: RadialProfile, m: SpectralMultiplier, p, times, grid: SpectralGrid,
             skeleton=None) -> DecayTable:
    """L^p norms with the volume element omega_{2n-1} r^{2n-1} dr ds; p > 2.

    The scaled column multiplies by t^{(n+1)(1-1/p)}, the rate forced by
    dilation when the rescaled solution settles on a fixed profile.
    """
    if not p > 2:
        raise ValueError("p must exceed 2")
    return _norm_table(u0, m, times, grid, p, skeleton, f"L{p:g}_norm")


def nonlocal_heat_gap(u0: RadialProfile, times, grid: SpectralGrid, jhat=example_kernel_symbol,
                      skeleton=None):
    """t^{n+1} sup |u(t) - v(t)| for the nonlocal and heat flows from the same data."""
    skeleton = u0.skeleton() if skeleton is None else skeleton
    mu_nl = SpectralMultiplier.nonlocal_(jhat)
    heat = SpectralMultiplier.heat()
    out = []
    for t in times:
        cu = rescaled_coefficients(u0, mu_nl, t, grid)
        cv = rescaled_coefficients(u0, heat, t, grid)
        out.append(inverse(cu - cv, skeleton).sup_norm())
    return np.array(out)


def zero_frequency_limit(u0: SpectralCoefficients):
    """uh0(0, k) by extrapolation from the two innermost nodes on each side.

    The transform of a rapidly decaying function has an expansion
    a_k + b_k |lam| + ... near lam = 0 (the Laguerre argument is |lam| r^2 / 2),
    so the extrapolation is linear in |lam|.  Values at +lam and -lam are
    averaged.  Returns (values of length k_max+1, max |difference| between
    the two nodes' raw values relative to the largest value).
    """
    grid = u0.grid
    lam = grid.lam
    pos = np.flatnonzero(lam > 0)
    neg = np.flatnonzero(lam < 0)
    i1, i2 = pos[0], pos[1]
    j1, j2 = neg[-1], neg[-2]
    l1, l2 = lam[i1], lam[i2]
    k1 = grid.counts[i1]
    k2 = grid.counts[i2]
    a = 0.5 * (u0.node_values(i1) + u0.node_values(j1))
    b = 0.5 * (u0.node_values(i2) + u0.node_values(j2))
    out = a.copy()
    kk = min(k1, k2)
    out[:kk] = (l2 * a[:kk] - l1 * b[:kk]) / (l2 - l1)
    disagreement = float(np.max(np.abs(a[:kk] - b[:kk])) / max(np.abs(a[:kk]).max(), 1e-300))
    return out, disagreement


def asymptotic_profile(u0: SpectralCoefficients) -> SpectralCoefficients:
    """Gh(lam, k) = e^{-|lam|(2k+n)} uh0(0, k) on u0's grid."""
    zero, disagreement = zero_frequency_limit(u0)
    grid = u0.grid
    k = grid.flat_k()
    mu = grid.flat_mu()
    vals = np.exp(-mu) * zero[np.minimum(k, zero.size - 1)]
    g = SpectralCoefficients(grid, vals, from_real=u0.from_real)
    g.diagnostics["extrapolation_disagreement"] = disagreement
    g.diagnostics["extrapolation_warning"] = disagreement > 0.05
    return g


def profile_convergence(u0: RadialProfile, m: SpectralMultiplier, times, grid: SpectralGrid,
                        skeleton=None):
    """max |t^{n+1} delta_t u(t) - G| on the skeleton, for each t."""
    skeleton = u0.skeleton() if skeleton is None else skeleton
    G = asymptotic_profile(forward(u0, grid))
    out = []
    for t in times:
        c = rescaled_coefficients(u0, m, t, grid)
        out.append(inverse(c - G, skeleton).sup_norm())
    return np.array(out), G
