"""Config files: one INI-style schema per command, hashed for artifact names.

A run config describes a single evolution (grid, packet, pulse, plan,
snapshots); a sweep config describes two swept axes plus fixed
parameters.  Every artifact the CLI writes starts with the commented
key=value dump of its config, so a run can be reproduced bit-for-bit
from its own output.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field

from .grid import Grid, make_grid
from .propagator import EvolutionPlan, PulseProfile
from .sweep import AxisSpec, SweepPlan
from .wavefunction import (
    PacketSpec1D,
    PacketSpecRing,
    WaveFunction,
    gaussian_1d,
    gaussian_ring_2d,
)

__all__ = ["ConfigError", "RunConfig", "parse_run_config", "parse_sweep_config"]

GEOMETRIES = ("1d", "2d-ring")


class ConfigError(ValueError):
    """Invalid or inconsistent configuration file."""


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one single-pulse evolution."""

    geometry: str
    grid_x_min: float
    grid_x_max: float
    grid_points: int
    sigma: float
    k: float
    x0: float = 0.0
    R: float | None = None
    pulse_kind: str = "gaussian"
    lam: float = 0.0
    pulse_t0: float = 1.0
    pulse_width: float | None = 0.001
    t_end: float = 4.0
    dt: float | None = None
    dt_pulse: float | None = None
    sample_stride: int = 1
    snapshot_times: tuple = ()

    def build_grid(self) -> Grid:
        dim = 1 if self.geometry == "1d" else 2
        return make_grid(dim, (self.grid_x_min, self.grid_x_max), self.grid_points)

    def build_pulse(self) -> PulseProfile:
        width = self.pulse_width if self.pulse_kind == "gaussian" else None
        return PulseProfile(self.pulse_kind, self.lam, self.pulse_t0, width)

    def build_plan(self) -> EvolutionPlan:
        dt = self.dt if self.dt is not None else 1e-3 * self.t_end
        if self.dt_pulse is not None:
            dt_pulse = self.dt_pulse
        elif self.pulse_kind == "gaussian":
            dt_pulse = self.pulse_width / 50.0
        else:
            dt_pulse = None
        return EvolutionPlan(
            t_end=self.t_end, dt=dt, dt_pulse=dt_pulse, sample_stride=self.sample_stride
        )

    def build_initial(self, grid: Grid) -> WaveFunction:
        if self.geometry == "1d":
            return gaussian_1d(PacketSpec1D(self.sigma, self.k, self.x0), grid)
        return gaussian_ring_2d(PacketSpecRing(self.R, self.sigma, self.k), grid)

    def validate(self) -> None:
        try:
            grid = self.build_grid()
            pulse = self.build_pulse()
            plan = self.build_plan()
            plan.validate_for(pulse)
            self.build_initial(grid)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        w_start, w_end = pulse.window
        if not (0.0 < w_start and w_end < self.t_end):
            raise ConfigError(
                f"pulse window [{w_start:.6g}, {w_end:.6g}] must lie inside (0, t_end={self.t_end})"
            )
        for t in self.snapshot_times:
            if t != "peak" and not (0.0 <= float(t) <= self.t_end):
                raise ConfigError(f"snapshot time {t} outside [0, t_end]")

    def dump_lines(self) -> list[str]:
        lines = [
            f"geometry={self.geometry}",
            f"grid_x_min={self.grid_x_min:.10g}",
            f"grid_x_max={self.grid_x_max:.10g}",
            f"grid_points={self.grid_points}",
            f"sigma={self.sigma:.10g}",
            f"k={self.k:.10g}",
        ]
        if self.geometry == "1d":
            lines.append(f"x0={self.x0:.10g}")
        else:
            lines.append(f"R={self.R:.10g}")
        lines += [
            f"pulse_kind={self.pulse_kind}",
            f"lambda={self.lam:.10g}",
            f"pulse_t0={self.pulse_t0:.10g}",
            f"pulse_width={'none' if self.pulse_width is None else format(self.pulse_width, '.10g')}",
            f"t_end={self.t_end:.10g}",
            f"dt={self.build_plan().dt:.10g}",
            f"dt_pulse={'none' if self.build_plan().dt_pulse is None else format(self.build_plan().dt_pulse, '.10g')}",
            f"sample_stride={self.sample_stride}",
        ]
        if self.snapshot_times:
            lines.append(
                "snapshot_times=" + ",".join(str(t) for t in self.snapshot_times)
            )
        return lines

    def config_hash(self) -> str:
        digest = hashlib.sha256("\n".join(self.dump_lines()).encode()).hexdigest()
        return digest[:12]

    def to_ini(self) -> str:
        """Render back to the config-file schema (parse -> render is stable)."""
        lines = [
            "[run]",
            f"geometry = {self.geometry}",
            f"t_end = {self.t_end!r}",
            "",
            "[grid]",
            f"x_min = {self.grid_x_min!r}",
            f"x_max = {self.grid_x_max!r}",
            f"points = {self.grid_points}",
            "",
            "[packet]",
            f"sigma = {self.sigma!r}",
            f"k = {self.k!r}",
        ]
        if self.geometry == "1d":
            lines.append(f"x0 = {self.x0!r}")
        else:
            lines.append(f"R = {self.R!r}")
        lines += [
            "",
            "[pulse]",
            f"kind = {self.pulse_kind}",
            f"lambda = {self.lam!r}",
            f"t0 = {self.pulse_t0!r}",
        ]
        if self.pulse_width is not None:
            lines.append(f"width = {self.pulse_width!r}")
        plan = self.build_plan()
        lines += ["", "[evolution]", f"dt = {plan.dt!r}"]
        if plan.dt_pulse is not None:
            lines.append(f"dt_pulse = {plan.dt_pulse!r}")
        lines.append(f"sample_stride = {self.sample_stride}")
        if self.snapshot_times:
            lines += [
                "",
                "[snapshots]",
                "times = " + ", ".join(str(t) for t in self.snapshot_times),
            ]
        return "\n".join(lines) + "\n"


def _section(parser: configparser.ConfigParser, name: str, path) -> configparser.SectionProxy:
    if not parser.has_section(name):
        raise ConfigError(f"{path}: missing [{name}] section")
    return parser[name]


def _get(section, key, conv, path, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"{path}: [{section.name}] is missing key {key!r}")
        return default
    raw = section[key]
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"{path}: [{section.name}] {key}={raw!r}: {exc}") from exc


def _load_ini(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive (R vs r)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parser


def parse_run_config(path) -> RunConfig:
    parser = _load_ini(path)
    run = _section(parser, "run", path)
    geometry = _get(run, "geometry", str, path, required=True).strip()
    if geometry not in GEOMETRIES:
        raise ConfigError(f"{path}: geometry must be one of {GEOMETRIES}, got {geometry!r}")
    grid = _section(parser, "grid", path)
    packet = _section(parser, "packet", path)
    pulse = _section(parser, "pulse", path)
    evo = parser["evolution"] if parser.has_section("evolution") else {}

    snapshot_times: tuple = ()
    if parser.has_section("snapshots") and "times" in parser["snapshots"]:
        tokens = [t.strip() for t in parser["snapshots"]["times"].split(",") if t.strip()]
        parsed = []
        for tok in tokens:
            if tok == "peak":
                parsed.append("peak")
            else:
                try:
                    parsed.append(float(tok))
                except ValueError as exc:
                    raise ConfigError(f"{path}: [snapshots] bad time {tok!r}") from exc
        snapshot_times = tuple(parsed)

    kind = _get(pulse, "kind", str, path, default="gaussian").strip()
    cfg = RunConfig(
        geometry=geometry,
        grid_x_min=_get(grid, "x_min", float, path, required=True),
        grid_x_max=_get(grid, "x_max", float, path, required=True),
        grid_points=_get(grid, "points", int, path, required=True),
        sigma=_get(packet, "sigma", float, path, required=True),
        k=_get(packet, "k", float, path, required=True),
        x0=_get(packet, "x0", float, path, default=0.0),
        R=_get(packet, "R", float, path, default=None),
        pulse_kind=kind,
        lam=_get(pulse, "lambda", float, path, required=True),
        pulse_t0=_get(pulse, "t0", float, path, default=1.0),
        pulse_width=_get(pulse, "width", float, path,
                         default=0.001 if kind == "gaussian" else None),
        t_end=_get(run, "t_end", float, path, default=4.0),
        dt=_get(evo, "dt", float, path, default=None) if evo else None,
        dt_pulse=_get(evo, "dt_pulse", float, path, default=None) if evo else None,
        sample_stride=_get(evo, "sample_stride", int, path, default=1) if evo else 1,
        snapshot_times=snapshot_times,
    )
    if cfg.geometry == "2d-ring" and cfg.R is None:
        raise ConfigError(f"{path}: [packet] needs R for 2d-ring geometry")
    cfg.validate()
    return cfg


def _parse_axis(raw: str, path) -> AxisSpec:
    parts = [p.strip() for p in raw.split(":")]
    if len(parts) != 4:
        raise ConfigError(f"{path}: axis must be name:lo:hi:count, got {raw!r}")
    name, lo, hi, count = parts
    try:
        return AxisSpec(name=name, lo=float(lo), hi=float(hi), count=int(count))
    except ValueError as exc:
        raise ConfigError(f"{path}: bad axis {raw!r}: {exc}") from exc


def parse_sweep_config(path) -> tuple[SweepPlan, Grid | None]:
    parser = _load_ini(path)
    sw = _section(parser, "sweep", path)
    geometry = _get(sw, "geometry", str, path, required=True).strip()
    axis1 = _parse_axis(_get(sw, "axis1", str, path, required=True), path)
    axis2 = _parse_axis(_get(sw, "axis2", str, path, required=True), path)
    fixed = {}
    if parser.has_section("fixed"):
        for key, raw in parser["fixed"].items():
            try:
                fixed[key] = float(raw)
            except ValueError as exc:
                raise ConfigError(f"{path}: [fixed] {key}={raw!r}: {exc}") from exc
    pulse = parser["pulse"] if parser.has_section("pulse") else {}
    kind = (pulse.get("kind", "gaussian") if pulse else "gaussian").strip()
    evo = parser["evolution"] if parser.has_section("evolution") else {}
    grid_override = None
    if parser.has_section("grid"):
        g = parser["grid"]
        dim = 1 if geometry == "1d" else 2
        grid_override = make_grid(
            dim,
            (_get(g, "x_min", float, path, required=True),
             _get(g, "x_max", float, path, required=True)),
            _get(g, "points", int, path, required=True),
        )
    try:
        plan = SweepPlan(
            geometry=geometry,
            axis1=axis1,
            axis2=axis2,
            fixed=fixed,
            pulse_kind=kind,
            pulse_t0=_get(pulse, "t0", float, path, default=1.0) if pulse else 1.0,
            pulse_width=(_get(pulse, "width", float, path, default=0.001)
                         if kind == "gaussian" else None),
            t_end=_get(sw, "t_end", float, path, default=4.0),
            sample_stride=_get(evo, "sample_stride", int, path, default=4) if evo else 4,
            grid_override=grid_override,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return plan, grid_override


def sweep_config_hash(plan: SweepPlan, grid: Grid) -> str:
    from .sweep import sweep_header

    digest = hashlib.sha256("\n".join(sweep_header(plan, grid)).encode()).hexdigest()
    return digest[:12]
