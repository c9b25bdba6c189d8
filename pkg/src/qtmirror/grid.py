"""Uniform periodic lattices and their spectral machinery.

All spatial derivatives in this package are spectral: a field is
transformed with the FFT, multiplied by a wavenumber symbol, and
transformed back.  Grids are power-of-two and square (in 2D) so every
run is reproducible and transform-friendly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid",
    "make_grid",
    "laplacian_symbol",
    "laplacian",
    "gradient",
    "forward",
    "inverse",
]


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Periodic lattice on [x_min, x_max) with n points per axis.

    1D grids are a line, 2D grids are a square with the same extent and
    resolution on both axes.  The conjugate wavenumber lattice follows
    the standard DFT layout k_j = 2*pi*fftfreq(n, dx).
    """

    dim: int
    x_min: float
    x_max: float
    n: int

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        """Coordinates along one axis (identical for both axes in 2D)."""
        return self.x_min + self.dx * np.arange(self.n)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Conjugate wavenumbers along one axis."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @cached_property
    def k_squared(self) -> np.ndarray:
        """|k|^2 on the full lattice (broadcast to the grid shape in 2D)."""
        k2 = self.wavenumbers**2
        if self.dim == 1:
            return k2
        return k2[:, None] + k2[None, :]

    def coords(self) -> tuple[np.ndarray, ...]:
        """Position arrays, one per axis, broadcastable to the grid shape."""
        if self.dim == 1:
            return (self.axis,)
        return (self.axis[:, None], self.axis[None, :])

    def radius(self) -> np.ndarray:
        """Distance from the origin (2D grids)."""
        if self.dim != 2:
            raise ValueError("radius() requires a 2D grid")
        x, y = self.coords()
        return np.hypot(x, y)

    def compatible_with(self, other: "Grid") -> bool:
        return (
            self.dim == other.dim
            and self.n == other.n
            and self.x_min == other.x_min
            and self.x_max == other.x_max
        )


def make_grid(dim: int, extent: tuple[float, float], points: int) -> Grid:
    """Build a periodic grid; 2D grids use `extent` on both axes.

    `points` must be a power of two >= 16 (transform performance and
    reproducibility), `extent` a finite (min, max) pair with max > min.
    """
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    x_min, x_max = float(extent[0]), float(extent[1])
    if not (math.isfinite(x_min) and math.isfinite(x_max)):
        raise ValueError(f"extent must be finite, got {extent}")
    if x_max <= x_min:
        raise ValueError(f"extent must satisfy max > min, got {extent}")
    if not isinstance(points, (int, np.integer)) or not _is_power_of_two(int(points)):
        raise ValueError(f"points must be a power of two, got {points}")
    if points < 16:
        raise ValueError(f"points must be >= 16, got {points}")
    return Grid(dim=dim, x_min=x_min, x_max=x_max, n=int(points))


def forward(field: np.ndarray) -> np.ndarray:
    """Forward transform to spectral space (unnormalized DFT)."""
    return np.fft.fftn(field)


def inverse(field_k: np.ndarray) -> np.ndarray:
    """Inverse transform back to position space."""
    return np.fft.ifftn(field_k)


def laplacian_symbol(grid: Grid) -> np.ndarray:
    """Spectral multiplier for the Laplacian: -|k|^2 on the lattice."""
    return -grid.k_squared


def laplacian(field: np.ndarray, grid: Grid) -> np.ndarray:
    """Spectrally accurate Laplacian of a (possibly complex) field."""
    return inverse(laplacian_symbol(grid) * forward(field))


def gradient(field: np.ndarray, grid: Grid) -> np.ndarray:
    """Spectral gradient.

    Returns an array of the field's shape in 1D, and a stacked array of
    shape (2, n, n) with the x- and y-derivatives in 2D.
    """
    if grid.dim == 1:
        return inverse(1j * grid.wavenumbers * forward(field))
    fk = forward(field)
    k = grid.wavenumbers
    dx_field = inverse(1j * k[:, None] * fk)
    dy_field = inverse(1j * k[None, :] * fk)
    return np.stack([dx_field, dy_field])
