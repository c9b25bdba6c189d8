"""Quantum-time-mirror analytics.

The instantaneous nonlinear kick multiplies the state by e^{-i*lam*rho},
which leaves the density untouched and shifts the probability current by
-lam*rho*grad(rho).  The closed-form threshold and echo-time estimates
for Gaussian packets (1D) and Gaussian rings (2D) live here too.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .grid import gradient
from .wavefunction import WaveFunction, density

__all__ = [
    "KICK_CONSTANT",
    "KickPrediction",
    "apply_kick",
    "current_jump",
    "lambda_min_1d",
    "lambda_min_2d",
    "echo_time",
    "reversed_fraction",
    "phase_comparison",
    "sigma_at_kick",
]

# C = e*sqrt(pi)/2, from anchoring the zero of the post-kick current at
# one packet width below center.
KICK_CONSTANT = math.e * math.sqrt(math.pi) / 2.0


def sigma_at_kick(sigma: float) -> float:
    """Packet width sqrt(sigma^2 + sigma^-2) after free flight to t=1."""
    return math.sqrt(sigma**2 + sigma**-2)


@dataclass(frozen=True)
class KickPrediction:
    """Analytic threshold and echo-time estimate for one kick strength."""

    lam: float
    lambda_min: float
    C: float = KICK_CONSTANT

    @property
    def t_echo(self) -> float | None:
        """Predicted echo time, None when lam is at or below threshold."""
        if self.lam <= self.lambda_min:
            return None
        return echo_time(self.lam, self.lambda_min)

    @classmethod
    def for_1d(cls, sigma: float, k: float, lam: float) -> "KickPrediction":
        return cls(lam=lam, lambda_min=lambda_min_1d(sigma, k))

    @classmethod
    def for_ring(cls, R: float, sigma: float, k: float, lam: float) -> "KickPrediction":
        return cls(lam=lam, lambda_min=lambda_min_2d(R, sigma, k))


def apply_kick(wf: WaveFunction, lam: float) -> WaveFunction:
    """Instantaneous kick: psi -> psi * e^{-i*lam*|psi|^2} (phase-only).

    The map cannot change the density, so the output carries the input
    density verbatim; density and norm are preserved to the bit, not
    merely to the rounding of the phase factor.
    """
    if lam < 0:
        raise ValueError(f"kick strength must be >= 0, got {lam}")
    rho = density(wf)
    return replace(wf, psi=wf.psi * np.exp(-1j * lam * rho), rho_cache=rho)


def current_jump(wf_minus: WaveFunction, lam: float) -> np.ndarray:
    """Analytic current jump -lam * rho * grad(rho) across the kick.

    Shape follows `gradient`; serves as the oracle for the numerically
    measured current difference current(apply_kick(psi)) - current(psi).
    """
    rho = density(wf_minus)
    return -lam * rho * np.real(gradient(rho, wf_minus.grid))


def lambda_min_1d(sigma: float, k: float) -> float:
    """Minimal kick strength C*k*(sigma^2 + 1/sigma^2) for a 1D Gaussian.

    Derived for fast packets; warns when k is not large against the
    internal momentum scale 1/(sigma^2 * sigma_1).
    """
    if sigma <= 0 or k <= 0:
        raise ValueError(f"sigma and k must be positive, got sigma={sigma}, k={k}")
    internal = 1.0 / (sigma**2 * sigma_at_kick(sigma))
    if k < 5.0 * internal:
        warnings.warn(
            f"lambda_min_1d estimate assumes k >> 1/(sigma^2*sigma_1) "
            f"(k={k}, scale={internal:.3g})",
            stacklevel=2,
        )
    return KICK_CONSTANT * k * (sigma**2 + sigma**-2)


def lambda_min_2d(R: float, sigma: float, k: float) -> float:
    """Minimal kick strength 2*pi*C*(R+k)*k*sigma^2 for a Gaussian ring."""
    if R <= 0 or sigma <= 0 or k <= 0:
        raise ValueError(
            f"R, sigma, k must be positive, got R={R}, sigma={sigma}, k={k}"
        )
    if not (1.0 < sigma < R and k * R > 10.0):
        warnings.warn(
            f"lambda_min_2d derived for 1 << sigma << R and kR >> 1 "
            f"(sigma={sigma}, R={R}, kR={k * R})",
            stacklevel=2,
        )
    return 2.0 * np.pi * KICK_CONSTANT * (R + k) * k * sigma**2


def echo_time(lam: float, lambda_min: float) -> float:
    """Echo arrival time lam/(lam - lambda_min), in units of the kick time."""
    if lam <= lambda_min:
        raise ValueError(
            f"no echo predicted: lam={lam} <= lambda_min={lambda_min}"
        )
    return lam / (lam - lambda_min)


def reversed_fraction(wf_plus: WaveFunction) -> float:
    """Probability weight moving backward after the kick.

    1D: weight where the current is negative; 2D: weight where the radial
    current points inward.
    """
    from .wavefunction import current as _current, radial_current

    rho = density(wf_plus)
    if wf_plus.grid.dim == 1:
        j = _current(wf_plus)
    else:
        j = radial_current(wf_plus)
    return float(np.sum(rho[j < 0.0]) * wf_plus.grid.cell_volume)


def phase_comparison(
    sigma: float,
    k: float,
    lam: float,
    xi: np.ndarray | None = None,
) -> dict[str, np.ndarray | float]:
    """QTM-imprinted phase vs ideal time-reversal phase at the kick moment.

    The imprinted phase is lam*rho(xi); the ideal (conjugation) phase is
    (xi/(sigma_1*sigma))^2 + 2*k*xi.  The returned shift is the constant
    that best aligns the ideal phase with the imprinted one in the
    rho-weighted least-squares sense; `phi_ideal_shifted` has it applied.
    """
    if sigma <= 0 or lam < 0:
        raise ValueError(f"need sigma > 0 and lam >= 0, got sigma={sigma}, lam={lam}")
    if xi is None:
        xi = np.linspace(-4.0 * sigma_at_kick(sigma), 4.0 * sigma_at_kick(sigma), 401)
    xi = np.asarray(xi, dtype=float)
    s1 = sigma_at_kick(sigma)
    rho = np.exp(-((xi / s1) ** 2)) / (math.sqrt(math.pi) * s1)
    phi_qtm = lam * rho
    phi_ideal = (xi / (s1 * sigma)) ** 2 + 2.0 * k * xi
    shift = float(np.sum(rho * (phi_qtm - phi_ideal)) / np.sum(rho))
    return {
        "xi": xi,
        "phi_qtm": phi_qtm,
        "phi_ideal": phi_ideal,
        "shift": shift,
        "phi_ideal_shifted": phi_ideal + shift,
    }
