"""Spherical transform on the Heisenberg group and nonlocal diffusion solvers."""

__version__ = "0.1.0"

from .cauchy import (SpectralMultiplier, asymptotic_profile, evolve_spectral, lp_decay,
                     profile_convergence, sup_norm_decay)
from .eigen import EigenResult, dirichlet_principal, neumann_gap, verify_decay
from .group import (Field, GroupPoint, LatticeDomain, dilate, group_convolve, group_inverse,
                    group_mul, heisenberg_laplacian_apply, radial_laplacian_apply)
from .heat import consistency_error, eps_convergence_study, solve_heat_dirichlet
from .kernels import KernelSpec, build_kernel, rescaled_kernel
from .nonlocal_ import (KernelMatrix, Trajectory, apply_rescaled_operator, build_kernel_matrix,
                        check_comparison, solve_dirichlet, solve_neumann, solve_rescaled_dirichlet)
from .radial import RadialProfile
from .special import SphericalIndex, bessel_j, eta, laguerre_normalized, phi
from .transform import (SpectralCoefficients, SpectralGrid, default_grid, forward, inverse,
                        sigma_norm)

__all__ = [
    "__version__",
    "SpectralMultiplier",
    "asymptotic_profile",
    "evolve_spectral",
    "lp_decay",
    "profile_convergence",
    "sup_norm_decay",
    "EigenResult",
    "dirichlet_principal",
    "neumann_gap",
    "verify_decay",
    "Field",
    "GroupPoint",
    "LatticeDomain",
    "dilate",
    "group_convolve",
    "group_inverse",
    "group_mul",
    "heisenberg_laplacian_apply",
    "radial_laplacian_apply",
    "consistency_error",
    "eps_convergence_study",
    "solve_heat_dirichlet",
    "KernelSpec",
    "build_kernel",
    "rescaled_kernel",
    "KernelMatrix",
    "Trajectory",
    "apply_rescaled_operator",
    "build_kernel_matrix",
    "check_comparison",
    "solve_dirichlet",
    "solve_neumann",
    "solve_rescaled_dirichlet",
    "RadialProfile",
    "SphericalIndex",
    "bessel_j",
    "eta",
    "laguerre_normalized",
    "phi",
    "SpectralCoefficients",
    "SpectralGrid",
    "default_grid",
    "forward",
    "inverse",
    "sigma_norm",
]
