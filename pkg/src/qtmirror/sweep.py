"""Deterministic parallel parameter sweeps over kick strength and packet shape.

Every cell of a sweep runs the same pipeline (build packet, evolve
through the pulse, detect the echo peak) on one shared grid sized for
the worst-case cell.  Cells are statically assigned to workers and
results are keyed by cell index, so the output bytes do not depend on
the worker count.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from . import __version__
from .echo import run_echo
from .grid import Grid, make_grid
from .mirror import lambda_min_1d, lambda_min_2d, sigma_at_kick
from .propagator import EvolutionPlan, PulseProfile
from .wavefunction import PacketSpec1D, PacketSpecRing, gaussian_1d, gaussian_ring_2d

__all__ = [
    "AxisSpec",
    "SweepPlan",
    "SweepResult",
    "run_sweep",
    "analytic_overlay",
    "resolve_grid",
    "write_sweep_csv",
]

SWEEPABLE = {"1d": ("lambda", "sigma", "k"), "2d-ring": ("lambda", "sigma", "k", "R")}

# Memory guard: refuse plans whose per-worker working set would thrash.
MAX_FIELD_BYTES = 1 << 30  # one complex field; ~8 live per run


@dataclass(frozen=True)
class AxisSpec:
    """One swept parameter: `count` evenly spaced values in [lo, hi]."""

    name: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"axis {self.name}: count must be >= 2, got {self.count}")
        if not (self.hi > self.lo):
            raise ValueError(f"axis {self.name}: need hi > lo, got [{self.lo}, {self.hi}]")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepPlan:
    """Two swept axes plus fixed parameters and a per-run evolution template."""

    geometry: str  # "1d" | "2d-ring"
    axis1: AxisSpec
    axis2: AxisSpec
    fixed: dict
    pulse_kind: str = "gaussian"
    pulse_t0: float = 1.0
    pulse_width: float | None = 0.001
    t_end: float = 4.0
    sample_stride: int = 4
    grid_override: Grid | None = None

    def __post_init__(self):
        if self.geometry not in SWEEPABLE:
            raise ValueError(f"unknown geometry {self.geometry!r}")
        names = {self.axis1.name, self.axis2.name}
        if len(names) != 2:
            raise ValueError("swept axes must be distinct")
        for name in names:
            if name not in SWEEPABLE[self.geometry]:
                raise ValueError(f"cannot sweep {name!r} in geometry {self.geometry}")
        required = {"1d": {"sigma", "k"}, "2d-ring": {"R", "sigma", "k"}}[self.geometry]
        missing = required - names - set(self.fixed)
        if missing:
            raise ValueError(f"missing fixed parameter(s): {sorted(missing)}")
        if "lambda" not in names and "lambda" not in self.fixed:
            raise ValueError("kick strength must be swept or fixed")

    def cell_params(self, v1: float, v2: float) -> dict:
        params = dict(self.fixed)
        params[self.axis1.name] = v1
        params[self.axis2.name] = v2
        return params


@dataclass
class SweepResult:
    plan: SweepPlan
    grid: Grid
    axis1_values: np.ndarray
    axis2_values: np.ndarray
    peak_strength: np.ndarray
    peak_time: np.ndarray
    reversed_fraction: np.ndarray
    failures: dict = field(default_factory=dict)
    overlay: tuple[np.ndarray, np.ndarray] | None = None


def _next_pow2(x: float) -> int:
    return max(16, 1 << math.ceil(math.log2(max(x, 1.0))))


def _max_imprint_velocity(geometry: str, params: dict) -> float:
    """Largest momentum the kick can imprint, from max |grad(lam*rho)| at t0."""
    lam = params["lambda"]
    sigma = params["sigma"]
    peak_slope = math.sqrt(2.0) * math.exp(-0.5)
    if geometry == "1d":
        s1 = sigma_at_kick(sigma)
        return lam * peak_slope / (math.sqrt(math.pi) * s1**2)
    r1 = params["R"] + params["k"]
    rho_peak = 1.0 / (2.0 * math.pi**1.5 * r1 * sigma)
    return lam * rho_peak * peak_slope / sigma


def _cell_lambda_min(geometry: str, params: dict) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if geometry == "1d":
            return lambda_min_1d(params["sigma"], params["k"])
        return lambda_min_2d(params["R"], params["sigma"], params["k"])


def resolve_grid(plan: SweepPlan) -> Grid:
    """Worst-case-cell grid: dx <= min(sigma)/8 and Nyquist >= 4*max(k*(1+lam/lam_min)).

    The extent covers the ballistic excursion of the fastest kicked
    fragments through t_end, with an 8-width dispersal margin.
    """
    cells = [
        plan.cell_params(v1, v2)
        for v1 in plan.axis1.values
        for v2 in plan.axis2.values
    ]
    sigma_min = min(c["sigma"] for c in cells)
    momentum = max(
        c["k"] * (1.0 + c["lambda"] / _cell_lambda_min(plan.geometry, c)) for c in cells
    )
    dx_max = min(sigma_min / 8.0, math.pi / (4.0 * momentum))
    t0 = plan.pulse_t0
    tail = plan.t_end - t0
    spread = max(math.sqrt(c["sigma"] ** 2 + (plan.t_end / c["sigma"]) ** 2) for c in cells)
    if plan.geometry == "1d":
        x_hi = max(
            c["k"] * t0 + (c["k"] + _max_imprint_velocity("1d", c)) * tail for c in cells
        ) + 8.0 * spread
        x_lo = min(
            c["k"] * t0 - max(_max_imprint_velocity("1d", c) - c["k"], 0.0) * tail
            for c in cells
        ) - 8.0 * spread
        x_lo = min(x_lo, -8.0 * spread)
        n = _next_pow2((x_hi - x_lo) / dx_max)
        grid = make_grid(1, (x_lo, x_hi), n)
    else:
        r_max = max(
            c["R"]
            + c["k"] * t0
            + (c["k"] + _max_imprint_velocity("2d-ring", c)) * tail
            for c in cells
        ) + 8.0 * spread
        n = _next_pow2(2.0 * r_max / dx_max)
        grid = make_grid(2, (-r_max, r_max), n)
    if 16 * grid.n**grid.dim > MAX_FIELD_BYTES:
        raise ValueError(
            f"resolved grid {grid.shape} exceeds the memory guard; narrow the "
            "sweep ranges or override the grid"
        )
    return grid


def _run_cell(task: tuple) -> tuple[int, int, float, float, float, str | None]:
    (i, j, geometry, grid_tuple, params, pulse_tuple, plan_tuple) = task
    try:
        grid = _cached_grid(grid_tuple)
        kind, t0, width = pulse_tuple
        t_end, dt, dt_pulse, stride = plan_tuple
        pulse = PulseProfile(kind, params["lambda"], t0, width)
        plan = EvolutionPlan(t_end=t_end, dt=dt, dt_pulse=dt_pulse, sample_stride=stride)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if geometry == "1d":
                wf0 = gaussian_1d(PacketSpec1D(params["sigma"], params["k"]), grid)
            else:
                wf0 = gaussian_ring_2d(
                    PacketSpecRing(params["R"], params["sigma"], params["k"]), grid
                )
            record, _, recorder = run_echo(wf0, pulse, plan)
        frac = recorder.reversed_fraction if recorder.reversed_fraction is not None else 0.0
        return (i, j, record.peak_strength, record.peak_time, frac, None)
    except Exception as exc:  # recorded per cell; sweep fails only in bulk
        return (i, j, math.nan, math.nan, math.nan, f"{type(exc).__name__}: {exc}")


@functools.lru_cache(maxsize=8)
def _cached_grid(grid_tuple: tuple) -> Grid:
    dim, x_min, x_max, n = grid_tuple
    return Grid(dim=dim, x_min=x_min, x_max=x_max, n=n)


def run_sweep(plan: SweepPlan, workers: int = 1) -> SweepResult:
    """Run every cell; deterministic output for any worker count."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    grid = plan.grid_override or resolve_grid(plan)
    dt = 1e-3 * plan.t_end
    dt_pulse = plan.pulse_width / 50.0 if plan.pulse_kind == "gaussian" else None
    v1s = plan.axis1.values
    v2s = plan.axis2.values
    tasks = [
        (
            i,
            j,
            plan.geometry,
            (grid.dim, grid.x_min, grid.x_max, grid.n),
            plan.cell_params(float(v1), float(v2)),
            (plan.pulse_kind, plan.pulse_t0, plan.pulse_width),
            (plan.t_end, dt, dt_pulse, plan.sample_stride),
        )
        for i, v1 in enumerate(v1s)
        for j, v2 in enumerate(v2s)
    ]
    if workers == 1:
        outcomes = [_run_cell(t) for t in tasks]
    else:
        block = math.ceil(len(tasks) / workers)
        with Pool(processes=workers) as pool:
            outcomes = pool.map(_run_cell, tasks, chunksize=block)

    shape = (len(v1s), len(v2s))
    strength = np.full(shape, np.nan)
    peak_time = np.full(shape, np.nan)
    frac = np.full(shape, np.nan)
    failures: dict = {}
    for i, j, s, t, f, err in outcomes:
        if err is None:
            strength[i, j], peak_time[i, j], frac[i, j] = s, t, f
        else:
            failures[(i, j)] = err
    if len(failures) > 0.1 * len(tasks):
        sample = list(failures.items())[:5]
        raise RuntimeError(
            f"{len(failures)}/{len(tasks)} sweep cells failed; first failures: {sample}"
        )
    overlay = None
    if "lambda" in (plan.axis1.name, plan.axis2.name):
        overlay = analytic_overlay(plan)
    return SweepResult(
        plan=plan,
        grid=grid,
        axis1_values=v1s,
        axis2_values=v2s,
        peak_strength=strength,
        peak_time=peak_time,
        reversed_fraction=frac,
        failures=failures,
        overlay=overlay,
    )


def analytic_overlay(plan: SweepPlan) -> tuple[np.ndarray, np.ndarray]:
    """Threshold curve lambda_min along the non-lambda axis."""
    names = (plan.axis1.name, plan.axis2.name)
    if "lambda" not in names:
        raise ValueError("analytic overlay needs lambda as a swept axis")
    other = plan.axis1 if plan.axis2.name == "lambda" else plan.axis2
    xs = other.values
    curve = np.empty_like(xs)
    for idx, x in enumerate(xs):
        params = dict(plan.fixed)
        params[other.name] = float(x)
        params.setdefault("lambda", 0.0)
        curve[idx] = _cell_lambda_min(plan.geometry, params)
    return xs, curve


def sweep_header(plan: SweepPlan, grid: Grid) -> list[str]:
    lines = [
        f"qtmirror_version={__version__}",
        f"geometry={plan.geometry}",
        f"axis1={plan.axis1.name}:{plan.axis1.lo:.10g}:{plan.axis1.hi:.10g}:{plan.axis1.count}",
        f"axis2={plan.axis2.name}:{plan.axis2.lo:.10g}:{plan.axis2.hi:.10g}:{plan.axis2.count}",
    ]
    for key in sorted(plan.fixed):
        lines.append(f"fixed_{key}={plan.fixed[key]:.10g}")
    lines += [
        f"pulse_kind={plan.pulse_kind}",
        f"pulse_t0={plan.pulse_t0:.10g}",
        f"pulse_width={plan.pulse_width if plan.pulse_width is not None else 'none'}",
        f"t_end={plan.t_end:.10g}",
        f"sample_stride={plan.sample_stride}",
        f"grid_dim={grid.dim}",
        f"grid_extent={grid.x_min:.10g}:{grid.x_max:.10g}",
        f"grid_points={grid.n}",
        "grid_rule=dx<=min(sigma)/8 and nyquist>=4*max(k*(1+lambda/lambda_min))",
    ]
    return lines


def write_sweep_csv(result: SweepResult, data_path, overlay_path) -> None:
    """File pair: cell matrix and analytic threshold overlay."""
    header = sweep_header(result.plan, result.grid)
    with open(data_path, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(f"{result.plan.axis1.name},{result.plan.axis2.name},"
                 "peak_strength,peak_time,reversed_fraction\n")
        for i, v1 in enumerate(result.axis1_values):
            for j, v2 in enumerate(result.axis2_values):
                fh.write(
                    f"{v1:.10g},{v2:.10g},{result.peak_strength[i, j]:.10g},"
                    f"{result.peak_time[i, j]:.10g},{result.reversed_fraction[i, j]:.10g}\n"
                )
    if result.overlay is None:
        return
    other = (
        result.plan.axis1 if result.plan.axis2.name == "lambda" else result.plan.axis2
    )
    xs, curve = result.overlay
    with open(overlay_path, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(f"{other.name},lambda_min\n")
        for x, y in zip(xs, curve):
            fh.write(f"{x:.10g},{y:.10g}\n")
