"""Nonlinear quantum time mirror: wave-packet echoes from a short nonlinear pulse."""

__version__ = "0.1.0"

from .grid import Grid, make_grid
from .mirror import (
    KICK_CONSTANT,
    KickPrediction,
    apply_kick,
    echo_time,
    lambda_min_1d,
    lambda_min_2d,
)
from .propagator import BoundaryContaminationError, EvolutionPlan, PulseProfile, evolve, free_segment
from .wavefunction import (
    PacketSpec1D,
    PacketSpecRing,
    WaveFunction,
    gaussian_1d,
    gaussian_ring_2d,
)
from .echo import EchoRecord, norm_correlation

__all__ = [
    "__version__",
    "Grid",
    "make_grid",
    "KICK_CONSTANT",
    "KickPrediction",
    "apply_kick",
    "echo_time",
    "lambda_min_1d",
    "lambda_min_2d",
    "BoundaryContaminationError",
    "EvolutionPlan",
    "PulseProfile",
    "evolve",
    "free_segment",
    "PacketSpec1D",
    "PacketSpecRing",
    "WaveFunction",
    "gaussian_1d",
    "gaussian_ring_2d",
    "EchoRecord",
    "norm_correlation",
]
