"""Compactly supported kernels J(z, s) that are radial in z and even in s."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, optimize

from .radial import sphere_area

__all__ = ["KernelSpec", "build_kernel", "rescaled_kernel", "bump", "ball_bump_moments",
           "read_kernel_config", "write_kernel_config"]

SHAPES = ("ball_bump", "product_bump")


def bump(tau2):
    """b(tau) = (1 - tau^2)^2 on |tau| <= 1, written in terms of tau^2."""
    tau2 = np.asarray(tau2, dtype=float)
    return np.where(tau2 < 1.0, (1.0 - tau2) ** 2, 0.0)


@dataclass(frozen=True)
class KernelSpec:
    """J(z, s) = scale * b(|z| / radius_z) * b((s - shift) / radius_s).

    ``mass`` is the integral of J and ``c1`` its horizontal second moment
    int J x_1^2.  For the unit kernel int J s^2 equals c1 as well; after
    rescaling by eps the s moment is eps^2 times the x moment.
    ``shift`` is zero for every shipped kernel; a nonzero value breaks the
    s-symmetry and exists only for negative controls.
    """

    n: int
    shape: str
    radius_z: float
    radius_s: float
    scale: float
    mass: float
    c1: float
    eps: float = 1.0
    shift: float = 0.0

    @property
    def j00(self):
        return float(self.evaluate(np.zeros(self.n), np.zeros(self.n), 0.0))

    @property
    def sup(self):
        return self.scale

    @property
    def is_s_symmetric(self):
        return self.shift == 0.0

    def evaluate(self, x, y, s):
        """J at (x, y, s); x and y carry the n horizontal components on the last axis."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r2 = np.zeros(x.shape[:-1])
        for j in range(x.shape[-1]):
            r2 = r2 + (x[..., j] * x[..., j] + y[..., j] * y[..., j])
        return self.evaluate_radial(r2, s, squared=True)

    def evaluate_radial(self, r, s, squared=False):
        r2 = np.asarray(r, dtype=float) if squared else np.asarray(r, dtype=float) ** 2
        ds = (np.asarray(s, dtype=float) - self.shift) / self.radius_s
        return self.scale * bump(r2 / self.radius_z**2) * bump(ds * ds)

    def as_config(self):
        return {
            "n": self.n, "shape": self.shape, "radius_z": self.radius_z,
            "radius_s": self.radius_s, "scale": self.scale, "mass": self.mass,
            "c1": self.c1, "eps": self.eps, "shift": self.shift,
        }


def ball_bump_moments(n, radius_z, radius_s):
    """(mass, x_1^2 moment, s^2 moment) of b(|z|/Rz) b(s/Rs) by adaptive quadrature."""
    area = sphere_area(n)
    zm = integrate.quad(lambda r: (1 - (r / radius_z) ** 2) ** 2 * r ** (2 * n - 1),
                        0, radius_z, epsabs=0, epsrel=1e-13)[0] * area
    z2 = integrate.quad(lambda r: (1 - (r / radius_z) ** 2) ** 2 * r ** (2 * n + 1),
                        0, radius_z, epsabs=0, epsrel=1e-13)[0] * area / (2 * n)
    sm = integrate.quad(lambda s: (1 - (s / radius_s) ** 2) ** 2, -radius_s, radius_s,
                        epsabs=0, epsrel=1e-13)[0]
    s2 = integrate.quad(lambda s: s * s * (1 - (s / radius_s) ** 2) ** 2, -radius_s, radius_s,
                        epsabs=0, epsrel=1e-13)[0]
    mass = zm * sm
    return mass, z2 * sm / mass, s2 * zm / mass


def build_kernel(n=1, shape="ball_bump", radius_z=2.0):
    """Unit-mass bump kernel whose three second moments agree.

    The s half-width is found by a 1D root find so that int J s^2 = int J x_1^2.
    ``product_bump`` is accepted only for n = 1, where its U(1)-invariant form
    b(|z|/Rz) b(s/Rs) coincides with the ball bump.
    """
    if shape not in SHAPES:
        raise ValueError(f"unknown kernel shape {shape!r}")
    if shape == "product_bump" and n != 1:
        raise ValueError("product_bump is not U(n)-invariant for n > 1")
    if radius_z <= 0:
        raise ValueError("radius must be positive")

    def mismatch(rs):
        _, mx, ms = ball_bump_moments(n, radius_z, rs)
        return ms - mx

    try:
        radius_s = optimize.brentq(mismatch, 1e-3 * radius_z, 1e3 * radius_z, xtol=1e-15, rtol=1e-15)
    except ValueError as exc:
        raise RuntimeError("second-moment matching did not converge") from exc
    mass, mx, _ = ball_bump_moments(n, radius_z, radius_s)
    return KernelSpec(n, shape, float(radius_z), float(radius_s), 1.0 / mass, 1.0, float(mx))


def rescaled_kernel(kernel: KernelSpec, eps) -> KernelSpec:
    """J^eps(z, s) = (2 / C1) eps^{-(2n+2)} J(z / eps, s / eps^2).

    Total mass becomes 2 / C1, each horizontal second moment 2 eps^2 and the
    s moment 2 eps^4, so eps^{-2} (J^eps * u - (2/C1) u) -> L u.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if kernel.eps != 1.0:
        raise ValueError("rescale the unit kernel, not an already rescaled one")
    n = kernel.n
    factor = 2.0 / kernel.c1 * eps ** (-(2 * n + 2))
    return replace(
        kernel,
        radius_z=kernel.radius_z * eps,
        radius_s=kernel.radius_s * eps**2,
        scale=kernel.scale * factor,
        mass=kernel.mass * 2.0 / kernel.c1,
        c1=2.0 * eps**2 * kernel.mass,
        eps=float(eps),
        shift=kernel.shift * eps**2,
    )


def write_kernel_config(kernel: KernelSpec, path):
    with open(path, "w") as fh:
        for key, value in kernel.as_config().items():
            fh.write(f"{key} = {value!r}\n" if isinstance(value, float) else f"{key} = {value}\n")


def read_kernel_config(path) -> KernelSpec:
    from .config import parse_config

    cfg = parse_config(path)
    return KernelSpec(
        n=int(cfg["n"]), shape=cfg["shape"], radius_z=float(cfg["radius_z"]),
        radius_s=float(cfg["radius_s"]), scale=float(cfg["scale"]), mass=float(cfg["mass"]),
        c1=float(cfg["c1"]), eps=float(cfg.get("eps", 1.0)), shift=float(cfg.get("shift", 0.0)),
    )


def closed_form_radius_s(n, radius_z):
    """Matching half-width for the ball bump: <s^2> = Rs^2/7 and <x_1^2> = Rz^2/(2(n+3))."""
    return radius_z * math.sqrt(7.0 / (2.0 * (n + 3)))
