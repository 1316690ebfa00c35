"""Spherical transform of radial functions on the first Heisenberg group.

A radial function f(|z|, s) is expanded over the spectral fan
(lam, k), lam real and k = 0, 1, 2, ..., where the Laplacian L acts as
multiplication by -|lam|(2k + n).  For a Gaussian the coefficients have a
closed form, which gives a direct check of the forward transform.
"""

import math

import numpy as np
from scipy.special import binom

from heisenspec import RadialProfile, default_grid, forward, inverse, sigma_norm

a, b = 1.0, 1.0
f = RadialProfile.from_function(lambda r, s: np.exp(-a * r * r - b * s * s), n=1, r_max=8.0)
grid = default_grid()
print(f"spectral grid: {grid.lam.size} lam nodes, up to k = {grid.k_max}, {grid.size} (lam, k) pairs")

coef = forward(f, grid)

# closed form for exp(-a r^2 - b s^2)
lam = np.abs(grid.flat_lambda())
k = grid.flat_k()
exact = (math.pi * math.sqrt(math.pi / b) * np.exp(-lam**2 / (4 * b))
         * ((a - lam / 4) / (a + lam / 4)) ** k / (a + lam / 4))
print(f"forward vs closed form: max abs difference {np.abs(coef.values - exact).max():.2e}")

# the inverse rebuilds f on its own grid
back = inverse(coef, f.skeleton())
err = np.abs(back.values - f.values).max() / np.abs(f.values).max()
print(f"roundtrip relative sup error: {err:.2e}")

# Plancherel: |f|_2^2 = (2 pi)^{-(n+1)} sum_k binom(k+n-1, k) int |f^(lam, k)|^2 |lam|^n dlam
exact_norm2 = math.pi / 2 * math.sqrt(math.pi / 2)
weights = grid.flat_weights() * binom(k + grid.n - 1, k)
spectral = np.sum(weights * np.abs(coef.values) ** 2) / (2 * math.pi) ** (grid.n + 1)
print(f"|f|_2^2 = {exact_norm2:.8f}, spectral side = {spectral:.8f}")
print(f"sigma norm (total weighted mass of the coefficients) = {sigma_norm(coef):.4f}")

# a few coefficients along the first rays
for kk in range(3):
    sel = (k == kk) & (grid.flat_lambda() > 0)
    i = np.flatnonzero(sel)[::40][:4]
    row = ", ".join(f"lam={grid.flat_lambda()[j]:.2f}: {coef.values[j].real:+.4f}" for j in i)
    print(f"k={kk}: {row}")
