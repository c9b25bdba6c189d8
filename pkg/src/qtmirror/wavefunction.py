"""Wave-packet construction and physical observables.

All states live in the dimensionless units of the rescaled equation of
motion (time unit = pulse arrival time, length unit = sqrt(hbar*t0/m)).
Constructors renormalize numerically so discretization error never
leaks into overlap denominators downstream.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .grid import Grid, forward, gradient

__all__ = [
    "WaveFunction",
    "PacketSpec1D",
    "PacketSpecRing",
    "gaussian_1d",
    "gaussian_ring_2d",
    "density",
    "current",
    "radial_current",
    "norm",
    "kinetic_energy",
    "mean_momentum_1d",
]


@dataclass(eq=False)
class WaveFunction:
    """Complex amplitude field on a Grid at dimensionless time t.

    `rho_cache` holds a density known analytically to be exact (set by
    phase-only maps, which cannot change the density); treat it as
    read-only.  Everything else recomputes |psi|^2 on demand.
    """

    grid: Grid
    psi: np.ndarray
    t: float = 0.0
    rho_cache: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.psi.shape != self.grid.shape:
            raise ValueError(
                f"amplitude shape {self.psi.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.psi)):
            raise ValueError("amplitudes must be finite (NaN/Inf found)")

    def copy(self) -> "WaveFunction":
        return replace(self, psi=self.psi.copy())


@dataclass(frozen=True)
class PacketSpec1D:
    """1D Gaussian packet: width sigma, mean momentum k, center x0."""

    sigma: float
    k: float
    x0: float = 0.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class PacketSpecRing:
    """Radially expanding Gaussian ring: radius R, width sigma, momentum k > 0."""

    R: float
    sigma: float
    k: float

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError(f"R must be positive, got {self.R}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.R < 3.0 * self.sigma:
            warnings.warn(
                f"ring with R={self.R} < 3*sigma={3 * self.sigma}: analytic ring "
                "formulas assume R >> sigma",
                stacklevel=3,
            )


def _renormalized(psi: np.ndarray, grid: Grid) -> np.ndarray:
    nrm = np.sqrt(np.sum(np.abs(psi) ** 2) * grid.cell_volume)
    if nrm == 0.0:
        raise ValueError("cannot normalize a zero field")
    return psi / nrm


def gaussian_1d(spec: PacketSpec1D, grid: Grid) -> WaveFunction:
    """Normalized Gaussian packet (pi*sigma^2)^(-1/4) e^{-x^2/2s^2 + ikx} at t=0."""
    if grid.dim != 1:
        raise ValueError("gaussian_1d requires a 1D grid")
    if spec.x0 - 6 * spec.sigma < grid.x_min or spec.x0 + 6 * spec.sigma > grid.x_max:
        raise ValueError(
            f"packet at x0={spec.x0} with sigma={spec.sigma} does not fit in "
            f"[{grid.x_min}, {grid.x_max})"
        )
    x = grid.axis - spec.x0
    psi = (np.pi * spec.sigma**2) ** (-0.25) * np.exp(
        -(x**2) / (2 * spec.sigma**2) + 1j * spec.k * x
    )
    return WaveFunction(grid, _renormalized(psi, grid), t=0.0)


def gaussian_ring_2d(spec: PacketSpecRing, grid: Grid) -> WaveFunction:
    """Gaussian ring of radius R and width sigma with radial momentum k, at t=0.

    The analytic prefactor normalizes the state only for R >> sigma, so the
    grid amplitudes are renormalized numerically after construction.
    """
    if grid.dim != 2:
        raise ValueError("gaussian_ring_2d requires a 2D grid")
    domain_radius = min(-grid.x_min, grid.x_max)
    if spec.R + 6 * spec.sigma > domain_radius:
        raise ValueError(
            f"ring R={spec.R}, sigma={spec.sigma} does not fit inside domain "
            f"radius {domain_radius}"
        )
    r = grid.radius()
    psi = np.sqrt(1.0 / (2 * np.pi**1.5 * spec.R * spec.sigma)) * np.exp(
        -((r - spec.R) ** 2) / (2 * spec.sigma**2) + 1j * spec.k * r
    )
    return WaveFunction(grid, _renormalized(psi, grid), t=0.0)


def density(wf: WaveFunction) -> np.ndarray:
    """Probability density |psi|^2."""
    if wf.rho_cache is not None:
        return wf.rho_cache
    return np.abs(wf.psi) ** 2


def current(wf: WaveFunction) -> np.ndarray:
    """Probability current Im[psi* grad(psi)], spectral gradient.

    Shape follows `gradient`: (n,) in 1D, (2, n, n) in 2D.
    """
    return np.imag(np.conj(wf.psi) * gradient(wf.psi, wf.grid))


def radial_current(wf: WaveFunction) -> np.ndarray:
    """Radial component j . r_hat on a 2D grid (zero at the origin)."""
    if wf.grid.dim != 2:
        raise ValueError("radial_current requires a 2D state")
    jx, jy = current(wf)
    x, y = wf.grid.coords()
    r = wf.grid.radius()
    with np.errstate(invalid="ignore", divide="ignore"):
        jr = (jx * x + jy * y) / r
    return np.where(r == 0.0, 0.0, jr)


def norm(wf: WaveFunction) -> float:
    """L2 norm sqrt(sum |psi|^2 dV)."""
    return float(np.sqrt(np.sum(density(wf)) * wf.grid.cell_volume))


def kinetic_energy(wf: WaveFunction) -> float:
    """Kinetic energy sum(|k|^2 |psi_k|^2)/2 via Parseval weights."""
    psi_k = forward(wf.psi)
    weight = wf.grid.cell_volume / wf.psi.size
    return float(0.5 * np.sum(wf.grid.k_squared * np.abs(psi_k) ** 2) * weight)


def mean_momentum_1d(wf: WaveFunction) -> float:
    """Expectation of -i d/dx, i.e. the integrated probability current."""
    if wf.grid.dim != 1:
        raise ValueError("mean_momentum_1d requires a 1D state")
    return float(np.sum(current(wf)) * wf.grid.dx)
