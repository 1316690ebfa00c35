"""Laguerre and Bessel functions and the spherical functions of (U(n), H_n).

The bounded spherical functions come in two families.  For lambda != 0 and
k = 0, 1, 2, ...

    phi_{lam,k}(z, s) = e^{i lam s} Lt_k^{n-1}(|lam| |z|^2 / 2) e^{-|lam| |z|^2 / 4}

where Lt_k^a = L_k^a / binom(k + a, k) is the Laguerre polynomial normalized
to 1 at the origin.  On the ray lambda = 0 they are the Bessel functions

    eta_r(z, s) = 2^{n-1} (n-1)! J_{n-1}(r |z|) / (r |z|)^{n-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .group import GroupPoint

__all__ = [
    "SphericalIndex",
    "laguerre_normalized",
    "laguerre_function",
    "bessel_j",
    "phi",
    "eta",
    "phi_radial",
]

# Rescaling threshold for the Laguerre-function recurrence.  When the
# polynomial part grows past BIG both stored terms are divided by BIG and the
# log of the factor is moved into the exponential.
_BIG = 1e150
_LOG_BIG = math.log(_BIG)
_SERIES_SWITCH = 4.0


@dataclass(frozen=True)
class SphericalIndex:
    """A point of the spectrum: either ('laguerre', lam, k) or ('bessel', r)."""

    kind: str
    lam: float = 0.0
    k: int = 0
    r: float = 0.0

    def __post_init__(self):
        if self.kind == "laguerre":
            if self.lam == 0:
                raise ValueError("laguerre branch needs lam != 0")
            if self.k < 0 or int(self.k) != self.k:
                raise ValueError("k must be a nonnegative integer")
        elif self.kind == "bessel":
            if self.r < 0:
                raise ValueError("bessel branch needs r >= 0")
        else:
            raise ValueError(f"unknown spectral kind {self.kind!r}")

    @classmethod
    def laguerre(cls, lam, k):
        return cls("laguerre", lam=float(lam), k=int(k))

    @classmethod
    def bessel(cls, r):
        return cls("bessel", r=float(r))

    def eigenvalue(self, n):
        """Eigenvalue of -L on the corresponding spherical function."""
        if self.kind == "laguerre":
            return abs(self.lam) * (2 * self.k + n)
        return self.r**2


# ---------------------------------------------------------------------------
# Laguerre


def laguerre_normalized(k, alpha, x):
    """L_k^alpha(x) / L_k^alpha(0), vectorized over x.

    Uses the recurrence for the normalized polynomials directly,

        (j+1+a) Lt_{j+1} = (2j+1+a-x) Lt_j - j Lt_{j-1},

    which is the usual three-term recurrence divided through by the integer
    normalization binom(j+a, j).  At x = 0 every step gives exactly 1.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for j in range(k):
        prev, cur = cur, ((2 * j + 1 + alpha - x) * cur - j * prev) / (j + 1 + alpha)
    return cur if cur.ndim else float(cur)


@numba.njit(cache=True)
def _laguerre_function_scalar(k, alpha, x):
    prev = 0.0
    cur = 1.0
    logscale = -0.5 * x
    for j in range(k):
        nxt = ((2 * j + 1 + alpha - x) * cur - j * prev) / (j + 1 + alpha)
        prev = cur
        cur = nxt
        if abs(cur) > _BIG:
            cur /= _BIG
            prev /= _BIG
            logscale += _LOG_BIG
    if cur == 0.0 or logscale < -745.0:
        return 0.0
    return cur * math.exp(logscale)


def laguerre_function(k, alpha, x):
    """psi_k(x) = Lt_k^alpha(x) e^{-x/2}, safe for large k and x."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    out = np.array([_laguerre_function_scalar(int(k), float(alpha), float(v)) for v in x.ravel()])
    out = out.reshape(x.shape)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Bessel


def _bessel_series_normalized(nu, x):
    # nu! (2/x)^nu J_nu(x) = sum_m (-x^2/4)^m / (m! (nu+1)_m), free of underflow at small x
    half = 0.5 * x
    term = 1.0
    total = term
    q = -half * half
    m = 0
    while True:
        m += 1
        term *= q / (m * (m + nu))
        total += term
        if abs(term) <= 1e-17 * abs(total) and m > half:
            break
    return total


def _bessel_series(nu, x):
    half = 0.5 * x
    return half**nu / math.factorial(nu) * _bessel_series_normalized(nu, x)


def _bessel_miller(nu, x):
    # Backward recurrence J_{m-1} = (2m/x) J_m - J_{m+1}, normalized with
    # J_0 + 2 sum J_{2j} = 1.  Valid for x > 0.
    start = int(max(nu, x)) + int(40 + 2 * math.sqrt(max(nu, x) * 40))
    start += start % 2
    jp1, j = 0.0, 1e-300
    norm = 0.0
    want = 0.0
    for m in range(start, 0, -1):
        jm1 = (2.0 * m / x) * j - jp1
        jp1, j = j, jm1
        if m - 1 == nu:
            want = j
        if (m - 1) % 2 == 0 and m - 1 > 0:
            norm += 2.0 * j
        if abs(j) > 1e250:
            j *= 1e-250
            jp1 *= 1e-250
            norm *= 1e-250
            want *= 1e-250
    norm += j
    return want / norm


def _bessel_scalar(nu, x):
    sign = 1.0
    if x < 0:
        x = -x
        sign = -1.0 if nu % 2 else 1.0
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    if x <= _SERIES_SWITCH:
        return sign * _bessel_series(nu, x)
    return sign * _bessel_miller(nu, x)


def bessel_j(nu, x):
    """Bessel function J_nu(x) of integer order nu >= 0.

    Power series for |x| <= 4, normalized Miller backward recurrence beyond.
    """
    nu = int(nu)
    if nu < 0:
        raise ValueError("order must be a nonnegative integer")
    x = np.asarray(x, dtype=float)
    out = np.array([_bessel_scalar(nu, float(v)) for v in x.ravel()]).reshape(x.shape)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Spherical functions


def phi_radial(lam, k, n, r, s):
    """phi_{lam,k} as a function of (|z|, s); broadcasts over r and s."""
    if lam == 0:
        raise ValueError("lam = 0 lies on the Bessel ray; use eta")
    r = np.asarray(r, dtype=float)
    x = 0.5 * abs(lam) * r * r
    return laguerre_function(k, n - 1, x) * np.exp(1j * lam * np.asarray(s, dtype=float))


def phi(lam, k, n, p: GroupPoint) -> complex:
    """Spherical function phi_{lam,k} evaluated at a group point."""
    if p.n != n:
        raise ValueError("dimension mismatch")
    return complex(phi_radial(lam, k, n, p.norm_z(), p.s))


def eta(r, n, p: GroupPoint) -> float:
    """Bessel-type spherical function eta_r, which does not depend on s."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if p.n != n:
        raise ValueError("dimension mismatch")
    x = r * p.norm_z()
    if x == 0.0:
        return 1.0
    nu = n - 1
    if x <= _SERIES_SWITCH:
        return _bessel_series_normalized(nu, x)
    return 2.0**nu * math.factorial(nu) * bessel_j(nu, x) / x**nu
