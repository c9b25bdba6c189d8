"""Dimensionalization for ultracold-atom experiments.

The simulation works in units where the kick arrives at t=1 and lengths
are measured in sqrt(hbar*t0/m).  This module converts between those
dimensionless quantities and laboratory values, and estimates the
scattering length needed to realize a given kick strength in a quasi-1D
condensate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "HBAR",
    "ATOMIC_MASS_UNIT",
    "LI7_MASS",
    "LabContext",
    "li7_context",
]

# CODATA values.
HBAR = 1.054571817e-34  # J s
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg

LI7_MASS = 7.016 * ATOMIC_MASS_UNIT  # kg


@dataclass(frozen=True)
class LabContext:
    """Laboratory-scale parameters anchoring the dimensionless units.

    mass in kg, t0 (free flight until the kick) in s; the optional
    fields are needed only for the scattering-length estimate:
    a_perp transverse confinement length (m), atom_number N, and
    kick_duration (s).
    """

    mass: float
    t0: float
    a_perp: float | None = None
    atom_number: float | None = None
    kick_duration: float | None = None

    def __post_init__(self):
        if self.mass <= 0 or self.t0 <= 0:
            raise ValueError("mass and t0 must be positive")
        for name in ("a_perp", "atom_number", "kick_duration"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive when set")

    @property
    def length_unit(self) -> float:
        """sqrt(hbar * t0 / m), in meters."""
        return math.sqrt(HBAR * self.t0 / self.mass)

    @property
    def velocity_unit(self) -> float:
        return self.length_unit / self.t0

    def sigma_from_length(self, length_m: float) -> float:
        return length_m / self.length_unit

    def length_from_sigma(self, sigma: float) -> float:
        return sigma * self.length_unit

    def k_from_velocity(self, velocity_m_s: float) -> float:
        return velocity_m_s / self.velocity_unit

    def velocity_from_k(self, k: float) -> float:
        return k * self.velocity_unit

    def scattering_length(self, lam: float) -> float:
        """Scattering length a_s = lam * a_perp^2 * sqrt(m t0 / hbar) / (2 N dt).

        Identifies the dimensionless kick strength with the quasi-1D
        contact coupling of N condensed atoms confined at a_perp and
        pulsed for kick_duration.
        """
        if lam < 0:
            raise ValueError(f"kick strength must be >= 0, got {lam}")
        missing = [
            name
            for name in ("a_perp", "atom_number", "kick_duration")
            if getattr(self, name) is None
        ]
        if missing:
            raise ValueError(f"scattering_length needs {', '.join(missing)} in the context")
        return (
            lam
            * self.a_perp**2
            * math.sqrt(self.mass * self.t0 / HBAR)
            / (2.0 * self.atom_number * self.kick_duration)
        )


def li7_context(
    t0: float = 10e-3,
    a_perp: float | None = 10e-6,
    atom_number: float | None = 1e7,
    kick_duration: float | None = 10e-6,
) -> LabContext:
    """Lithium-7 context with the reference experimental parameters."""
    return LabContext(
        mass=LI7_MASS,
        t0=t0,
        a_perp=a_perp,
        atom_number=atom_number,
        kick_duration=kick_duration,
    )
