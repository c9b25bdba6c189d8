"""Echo quantification: norm correlation, peak detection, threshold search.

The echo metric is the density correlation
N(t) = sum(rho0 * rho_t) / sqrt(sum(rho0^2) * sum(rho_t^2)),
a number in [0, 1] that reaches 1 exactly when the evolved density is
proportional to the initial one.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .mirror import KickPrediction, reversed_fraction
from .propagator import EvolutionPlan, PulseProfile, evolve
from .wavefunction import WaveFunction, density, norm

__all__ = [
    "EchoRecord",
    "EchoRecorder",
    "norm_correlation",
    "detect_echo",
    "find_lambda_min_numerical",
    "ECHO_THRESHOLD",
]

# Echo-present criterion for the numerical threshold search: peak must
# rise this far above the free-dispersal baseline at the same time.
ECHO_THRESHOLD = 0.2


def _correlate(rho_ref: np.ndarray, rho: np.ndarray) -> float:
    denom = math.sqrt(float(np.sum(rho_ref**2)) * float(np.sum(rho**2)))
    if denom == 0.0:
        raise ValueError("norm correlation undefined for zero densities")
    return float(np.sum(rho_ref * rho) / denom)


def norm_correlation(wf_ref: WaveFunction, wf: WaveFunction) -> float:
    """Density overlap of Eq.-(10) type; 1 iff densities are proportional."""
    if not wf_ref.grid.compatible_with(wf.grid):
        raise ValueError("norm correlation requires states on the same grid")
    return _correlate(density(wf_ref), density(wf))


@dataclass
class EchoRecord:
    """Sampled N(t) time series with the detected post-pulse peak."""

    times: np.ndarray
    values: np.ndarray  # N(t)
    norms: np.ndarray
    peak_strength: float
    peak_time: float
    is_echo: bool
    secondary_peaks: list[tuple[float, float]] = field(default_factory=list)
    prediction: KickPrediction | None = None

    def baseline_at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))


class EchoRecorder:
    """Observable sink for evolve(): gathers N(t), norm, peak-rho position.

    Also captures the reversed probability fraction at the first sample
    at/after the end of the pulse window (the post-kick state).
    """

    def __init__(self, wf0: WaveFunction, pulse: PulseProfile | None = None):
        self.grid = wf0.grid
        self.rho0 = density(wf0)
        self.times: list[float] = []
        self.values: list[float] = []
        self.norms: list[float] = []
        self.peak_rho_pos: list[float] = []
        self.reversed_fraction: float | None = None
        self._pulse_end = pulse.window[1] if pulse is not None else None

    def __call__(self, t: float, wf: WaveFunction) -> None:
        rho = density(wf)
        self.times.append(t)
        self.values.append(_correlate(self.rho0, rho))
        self.norms.append(float(np.sqrt(rho.sum() * self.grid.cell_volume)))
        idx = np.unravel_index(int(np.argmax(rho)), rho.shape)
        if self.grid.dim == 1:
            self.peak_rho_pos.append(float(self.grid.axis[idx[0]]))
        else:
            self.peak_rho_pos.append(
                float(np.hypot(self.grid.axis[idx[0]], self.grid.axis[idx[1]]))
            )
        if (
            self.reversed_fraction is None
            and self._pulse_end is not None
            and t >= self._pulse_end - 1e-12
        ):
            self.reversed_fraction = reversed_fraction(wf)

    def record(self, pulse: PulseProfile, prediction: KickPrediction | None = None) -> EchoRecord:
        times = np.asarray(self.times)
        values = np.asarray(self.values)
        peak_strength, peak_time, is_echo, secondary = detect_echo(times, values, pulse)
        return EchoRecord(
            times=times,
            values=values,
            norms=np.asarray(self.norms),
            peak_strength=peak_strength,
            peak_time=peak_time,
            is_echo=is_echo,
            secondary_peaks=secondary,
            prediction=prediction,
        )


def detect_echo(
    times: np.ndarray,
    values: np.ndarray,
    pulse: PulseProfile,
) -> tuple[float, float, bool, list[tuple[float, float]]]:
    """Locate the norm-correlation peak after the pulse.

    Returns (peak_strength, peak_time, is_echo, secondary_peaks), where
    is_echo is False when the post-pulse maximum sits at the edge of the
    search window (monotone decay, no revival), and secondary_peaks
    lists every interior local maximum above half the main peak.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if pulse.kind == "gaussian":
        guard = pulse.t0 + 10.0 * pulse.width
    else:
        guard = pulse.t0 + 0.05
    start = bisect.bisect_right(times.tolist(), guard)
    if len(times) - start < 2:
        raise ValueError(f"need at least 2 samples after the pulse guard t={guard:.4g}")
    window_t = times[start:]
    window_v = values[start:]
    i_max = int(np.argmax(window_v))
    peak_strength = float(window_v[i_max])
    peak_time = float(window_t[i_max])
    interior = (
        0 < i_max < len(window_v) - 1
        and window_v[i_max] > window_v[i_max - 1]
        and window_v[i_max] >= window_v[i_max + 1]
    )
    secondary = []
    for i in range(1, len(window_v) - 1):
        if (
            window_v[i] > window_v[i - 1]
            and window_v[i] >= window_v[i + 1]
            and window_v[i] >= 0.5 * peak_strength
        ):
            secondary.append((float(window_t[i]), float(window_v[i])))
    return peak_strength, peak_time, bool(interior), secondary


def run_echo(
    wf0: WaveFunction,
    pulse: PulseProfile,
    plan: EvolutionPlan,
    prediction: KickPrediction | None = None,
) -> tuple[EchoRecord, WaveFunction, EchoRecorder]:
    """Evolve and package the echo diagnostics for one configuration."""
    recorder = EchoRecorder(wf0, pulse)
    final = evolve(wf0, pulse, plan, sink=recorder)
    return recorder.record(pulse, prediction), final, recorder


def find_lambda_min_numerical(
    make_initial,
    pulse_template: PulseProfile,
    plan: EvolutionPlan,
    bracket: tuple[float, float],
    threshold: float = ECHO_THRESHOLD,
    rtol: float = 0.02,
) -> dict[str, float]:
    """Bisect for the smallest kick strength that produces an echo.

    `make_initial` builds the initial state (called once); an echo is
    "present" at strength lam when the post-pulse peak exceeds the
    lam=0 baseline at the same time by more than `threshold`.  Returns
    the confirmed upper end of the final bracket plus diagnostics.
    """
    lo, hi = bracket
    if not (0 <= lo < hi):
        raise ValueError(f"invalid bracket {bracket}")
    wf0 = make_initial()
    baseline_rec, _, _ = run_echo(
        wf0, PulseProfile(pulse_template.kind, 0.0, pulse_template.t0, pulse_template.width), plan
    )

    def present(lam: float) -> bool:
        pulse = PulseProfile(pulse_template.kind, lam, pulse_template.t0, pulse_template.width)
        rec, _, _ = run_echo(wf0, pulse, plan)
        return rec.peak_strength - baseline_rec.baseline_at(rec.peak_time) > threshold

    if present(lo):
        raise ValueError(f"no sign change: echo already present at bracket start {lo}")
    if not present(hi):
        raise ValueError(f"no sign change: no echo at bracket end {hi}")
    evaluations = 2
    while (hi - lo) > rtol * 0.5 * (hi + lo):
        mid = 0.5 * (lo + hi)
        if present(mid):
            hi = mid
        else:
            lo = mid
        evaluations += 1
    return {
        "lambda_min": hi,
        "bracket_low": lo,
        "bracket_high": hi,
        "threshold": threshold,
        "evaluations": evaluations,
    }


def write_echo_csv(path, record: EchoRecord, header_lines: list[str]) -> None:
    """EchoRecord CSV: commented config dump, then t, norm_corr, norm rows."""
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("t,norm_corr,norm\n")
        for t, v, n in zip(record.times, record.values, record.norms):
            fh.write(f"{t:.10g},{v:.10g},{n:.10g}\n")
