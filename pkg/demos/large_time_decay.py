"""Large-time behaviour of the nonlocal flow u_t = J * u - u on the whole group.

With kernel symbol e^{-|lam|(2k+n)} the sup norm decays like t^{-(n+1)} = t^{-2}
for n = 1, and the dilated solution t^2 u(delta_t p, t) settles on a
fixed profile G built from the zero-frequency coefficients of u0.  The heat
flow from the same data has the same leading behaviour.
"""

import numpy as np

from heisenspec import RadialProfile, SpectralMultiplier, default_grid, profile_convergence, sup_norm_decay
from heisenspec.cauchy import lp_decay, nonlocal_heat_gap

u0 = RadialProfile.from_function(lambda r, s: np.exp(-r * r / 6 - s * s), n=1, r_max=14.0)
grid = default_grid()
times = np.geomspace(10, 100, 7)

table = sup_norm_decay(u0, SpectralMultiplier.nonlocal_(), times, grid)
print("t        sup|u|       t^2 sup|u|")
for t, v, sv in table.rows():
    print(f"{t:7.2f}  {v:.4e}  {sv:.5f}")
print(f"fitted slope {table.slope:.4f} (dilation predicts -2)")

heat = sup_norm_decay(u0, SpectralMultiplier.heat(), times, grid)
print(f"heat flow slope over the same window: {heat.slope:.4f}")

ladder = [10.0, 20.0, 40.0, 80.0]
gap = nonlocal_heat_gap(u0, ladder, grid)
print("t^2 sup|u - v| on the ladder:", ", ".join(f"{g:.4e}" for g in gap))

dist, G = profile_convergence(u0, SpectralMultiplier.nonlocal_(), ladder, grid)
print("max|t^2 u(delta_t) - G|:   ", ", ".join(f"{d:.4e}" for d in dist))
print(f"zero-frequency extrapolation disagreement {G.diagnostics['extrapolation_disagreement']:.3f}")

# the L^4 norm follows the dilation rate -(n+1)(1 - 1/p) = -1.5
l4 = lp_decay(u0, SpectralMultiplier.nonlocal_(), 4.0, times, grid)
print(f"L^4 slope {l4.slope:.4f}")
