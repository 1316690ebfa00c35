"""From the rescaled nonlocal operator to the Heisenberg Laplacian.

Rescaling J by eps (horizontal eps, vertical eps^2) and normalizing by its
second moment gives an operator L_eps that reproduces L on quadratics and
converges on smooth fields.  The rescaled Dirichlet problem then tracks an
exact heat solution, with the error kept under K1 eps^alpha t + K2 eps.
"""

from heisenspec import build_kernel
from heisenspec.experiments import EXACT_FIELDS
from heisenspec.heat import consistency_error, eps_convergence_study, gaussian_test_field

J = build_kernel(1, "ball_bump", 2.0)
eps = [0.4, 0.2, 0.1]

for name, (v, Lv) in EXACT_FIELDS.items():
    table = consistency_error(J, eps, v, Lv)
    print(f"L_eps v - L v for v = {name:3s}: " + ", ".join(f"{e:.2e}" for e in table.errors))

v, Lv = gaussian_test_field()
table = consistency_error(J, eps, v, Lv)
print("Gaussian field:            " + ", ".join(f"{e:.2e}" for e in table.errors)
      + f"  order {table.order:.2f}")

rows, order = eps_convergence_study(J, eps)
print("eps    nodes   sup error   error / barrier")
for row in rows:
    print(f"{row['eps']:.2f}  {row['omega_nodes']:6d}  {row['sup_error']:.3e}   {row['max_ratio']:.3f}")
print(f"fitted order {order:.2f}")
