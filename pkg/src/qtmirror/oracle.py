"""Closed-form free-evolution references used as ground truth in tests.

The 1D Gaussian solution is exact (analytic global phase included); the
2D ring solution is the stationary-phase asymptotic result, valid for
slow spreading (t << sigma^2), thin rings (sigma << R) and fast radial
motion (kR >> 1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grid import Grid
from .wavefunction import PacketSpec1D, PacketSpecRing, WaveFunction

__all__ = [
    "RingAsymptoticRegime",
    "gaussian_free_1d",
    "ring_free_2d",
    "plane_wave_free",
    "l2_distance",
    "overlap",
    "global_phase_distance",
]


@dataclass(frozen=True)
class RingAsymptoticRegime:
    """Validity bookkeeping for the asymptotic ring solution."""

    epsilon: float  # t / sigma^2
    kR: float
    sigma_over_R: float

    @classmethod
    def from_params(cls, spec: PacketSpecRing, t: float) -> "RingAsymptoticRegime":
        return cls(
            epsilon=t / spec.sigma**2,
            kR=spec.k * spec.R,
            sigma_over_R=spec.sigma / spec.R,
        )

    @property
    def valid(self) -> bool:
        return self.epsilon < 0.1 and self.sigma_over_R < 1.0 / 3.0 and self.kR > 10.0

    def warn_if_invalid(self) -> None:
        if not self.valid:
            warnings.warn(
                f"ring asymptotics outside validity regime: eps={self.epsilon:.3g} "
                f"(<0.1), sigma/R={self.sigma_over_R:.3g} (<1/3), kR={self.kR:.3g} (>10)",
                stacklevel=3,
            )


def gaussian_free_1d(spec: PacketSpec1D, t: float, grid: Grid) -> WaveFunction:
    """Exact freely-evolved 1D Gaussian, analytic phase included."""
    if grid.dim != 1:
        raise ValueError("gaussian_free_1d requires a 1D grid")
    s2 = spec.sigma**2
    z = 1.0 + 1j * t / s2
    xi = grid.axis - spec.x0 - spec.k * t
    psi = (
        (np.pi * s2) ** (-0.25)
        / np.sqrt(z)
        * np.exp(-(xi**2) / (2 * s2 * z) + 1j * spec.k * (grid.axis - spec.x0 - spec.k * t / 2))
    )
    return WaveFunction(grid, psi, t=t)


def ring_free_2d(spec: PacketSpecRing, t: float, grid: Grid) -> WaveFunction:
    """Asymptotic freely-evolved Gaussian ring: radius grows as R + k*t.

    Phase convention matches the e^{ikr} initial ring (a constant e^{ikR}
    relative to the centered-phase derivation).  Amplitudes keep the
    analytic 1/sqrt(r_t) normalization; no numerical renormalization.
    """
    if grid.dim != 2:
        raise ValueError("ring_free_2d requires a 2D grid")
    RingAsymptoticRegime.from_params(spec, t).warn_if_invalid()
    r_t = spec.R + spec.k * t
    r = grid.radius()
    psi = np.sqrt(1.0 / (2 * np.pi**1.5 * spec.sigma * r_t)) * np.exp(
        -((r - r_t) ** 2) / (2 * spec.sigma**2)
        + 1j * spec.k * (r - r_t)
        + 1j * spec.k**2 * t / 2
        + 1j * spec.k * spec.R
    )
    return WaveFunction(grid, psi, t=t)


def plane_wave_free(q, t: float, grid: Grid) -> WaveFunction:
    """Exact evolution of a normalized lattice plane wave e^{iq.x - i|q|^2 t/2}."""
    q_vec = np.atleast_1d(np.asarray(q, dtype=float))
    if q_vec.shape != (grid.dim,):
        raise ValueError(f"q must have {grid.dim} component(s), got {q}")
    mode_numbers = q_vec * grid.length / (2 * np.pi)
    if np.any(np.abs(mode_numbers - np.round(mode_numbers)) > 1e-9):
        raise ValueError(f"q={q} is not commensurate with the lattice")
    phase = np.zeros(grid.shape)
    for qi, xi in zip(q_vec, grid.coords()):
        phase = phase + qi * xi
    q2 = float(np.dot(q_vec, q_vec))
    psi = np.exp(1j * (phase - q2 * t / 2.0)) / np.sqrt(grid.length**grid.dim)
    return WaveFunction(grid, psi, t=t)


def l2_distance(a: WaveFunction, b: WaveFunction) -> float:
    """Fixed-gauge L2 distance sqrt(sum |a-b|^2 dV)."""
    if not a.grid.compatible_with(b.grid):
        raise ValueError("states live on different grids")
    return float(np.sqrt(np.sum(np.abs(a.psi - b.psi) ** 2) * a.grid.cell_volume))


def overlap(a: WaveFunction, b: WaveFunction) -> complex:
    """Inner product <a|b> = sum conj(a)*b dV."""
    if not a.grid.compatible_with(b.grid):
        raise ValueError("states live on different grids")
    return complex(np.sum(np.conj(a.psi) * b.psi) * a.grid.cell_volume)


def global_phase_distance(a: WaveFunction, b: WaveFunction) -> float:
    """L2 distance minimized over a global phase on b.

    Equals sqrt(|a|^2 + |b|^2 - 2|<a|b>|): the right gauge when two
    expressions for the same state differ by a spatially uniform phase.
    """
    na2 = float(np.sum(np.abs(a.psi) ** 2) * a.grid.cell_volume)
    nb2 = float(np.sum(np.abs(b.psi) ** 2) * b.grid.cell_volume)
    ov = abs(overlap(a, b))
    return float(np.sqrt(max(na2 + nb2 - 2.0 * ov, 0.0)))
