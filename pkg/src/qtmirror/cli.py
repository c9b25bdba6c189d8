"""Command-line driver: single runs, sweeps, phase tables, validation, units.

Exit codes: 0 success, 1 validation/config error, 2 numerical-guard trip
(boundary contamination), 3 internal error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, parse_run_config, parse_sweep_config, sweep_config_hash
from .echo import run_echo, write_echo_csv
from .grid import make_grid
from .mirror import KickPrediction, phase_comparison
from .oracle import gaussian_free_1d, l2_distance
from .propagator import (
    BoundaryContaminationError,
    EvolutionPlan,
    PulseProfile,
    evolve,
    free_segment,
)
from .snapshots import write_qtmw, write_snapshot_csv
from .sweep import run_sweep, write_sweep_csv
from .units import ATOMIC_MASS_UNIT, LabContext, li7_context
from .wavefunction import (
    PacketSpec1D,
    WaveFunction,
    density,
    gaussian_1d,
    norm,
)

__all__ = ["main", "run_validation_checks"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2; remap
        raise ConfigError(message)


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("QTM_OUT") or "qtm_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def resolve_config_path(name: str) -> Path:
    """Accept a filesystem path or the name of a bundled preset."""
    path = Path(name)
    if path.exists():
        return path
    stem = name if name.endswith(".cfg") else f"{name}.cfg"
    preset = resources.files("qtmirror").joinpath("presets", stem)
    if preset.is_file():
        return Path(str(preset))
    raise ConfigError(f"config {name!r} not found (no such file or bundled preset)")


def list_presets() -> list[str]:
    root = resources.files("qtmirror").joinpath("presets")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


class _SnapshotSink:
    """Capture the sampled state closest to each requested time."""

    def __init__(self, targets: list[float]):
        self.targets = targets
        self.best: list[tuple[float, WaveFunction | None]] = [
            (math.inf, None) for _ in targets
        ]

    def __call__(self, t: float, wf: WaveFunction) -> None:
        for i, target in enumerate(self.targets):
            gap = abs(t - target)
            if gap < self.best[i][0]:
                self.best[i] = (gap, wf.copy())


def cmd_run(args) -> int:
    cfg = parse_run_config(resolve_config_path(args.config))
    out = _out_dir(args)
    grid = cfg.build_grid()
    wf0 = cfg.build_initial(grid)
    pulse = cfg.build_pulse()
    plan = cfg.build_plan()
    try:
        if cfg.geometry == "1d":
            prediction = KickPrediction.for_1d(cfg.sigma, cfg.k, cfg.lam)
        else:
            prediction = KickPrediction.for_ring(cfg.R, cfg.sigma, cfg.k, cfg.lam)
    except ValueError:
        prediction = None

    record, _, recorder = run_echo(wf0, pulse, plan, prediction)
    tag = cfg.config_hash()
    header = [f"qtmirror_version={__version__}", *cfg.dump_lines()]
    echo_path = out / f"run_{tag}_echo.csv"
    write_echo_csv(echo_path, record, header)

    snapshot_paths = []
    if cfg.snapshot_times:
        targets, labels = [], []
        for t in cfg.snapshot_times:
            if t == "peak":
                targets.append(record.peak_time)
                labels.append(f"peak_t{record.peak_time:.4f}")
            else:
                targets.append(float(t))
                labels.append(f"t{float(t):.4f}")
        sink = _SnapshotSink(targets)
        evolve(wf0, pulse, plan, sink=sink)
        for label, (gap, wf) in zip(labels, sink.best):
            base = str(out / f"run_{tag}_snap_{label}")
            snap_header = header + [f"snapshot_time={wf.t:.10g}"]
            write_snapshot_csv(base + ".csv", wf, snap_header)
            write_qtmw(base + ".qtmw", wf)
            snapshot_paths.append(base + ".csv")

    if not args.quiet:
        print(f"run {tag}: geometry={cfg.geometry} lambda={cfg.lam:g} "
              f"sigma={cfg.sigma:g} k={cfg.k:g}")
        if prediction is not None:
            t_echo = prediction.t_echo
            print(f"  analytic lambda_min={prediction.lambda_min:.4g}, "
                  f"analytic echo time={'none (below threshold)' if t_echo is None else format(t_echo, '.4g')}")
        if record.is_echo:
            print(f"  peak norm correlation {record.peak_strength:.4g} at "
                  f"t={record.peak_time:.4g} (echo detected)")
        else:
            print(f"  no echo: post-pulse maximum {record.peak_strength:.4g} at "
                  f"t={record.peak_time:.4g} is a monotone-decay edge value")
        if record.secondary_peaks:
            peaks = ", ".join(f"{v:.3g}@t={t:.3g}" for t, v in record.secondary_peaks)
            print(f"  local maxima above half peak: {peaks}")
        if recorder.reversed_fraction is not None:
            print(f"  reversed fraction after pulse: {recorder.reversed_fraction:.4g}")
        print(f"  wrote {echo_path}" +
              (f" and {len(snapshot_paths)} snapshot file pair(s)" if snapshot_paths else ""))
    return 0


def cmd_sweep(args) -> int:
    plan, _ = parse_sweep_config(resolve_config_path(args.config))
    out = _out_dir(args)
    result = run_sweep(plan, workers=args.workers)
    tag = sweep_config_hash(plan, result.grid)
    data_path = out / f"sweep_{tag}.csv"
    overlay_path = out / f"sweep_{tag}_overlay.csv"
    write_sweep_csv(result, data_path, overlay_path)
    if not args.quiet:
        cells = result.peak_strength.size
        print(f"sweep {tag}: {plan.axis1.name} x {plan.axis2.name}, {cells} cells, "
              f"{len(result.failures)} failed, grid {result.grid.shape}")
        print(f"  wrote {data_path}" +
              (f" and {overlay_path}" if result.overlay is not None else ""))
        for (i, j), reason in list(result.failures.items())[:5]:
            print(f"  cell ({i},{j}) failed: {reason}")
    return 0


def cmd_phases(args) -> int:
    lambdas = _parse_float_list(args.lambdas, "lambdas")
    if not lambdas:
        raise ConfigError("need at least one kick strength in --lambdas")
    out = _out_dir(args)
    xi = np.linspace(args.xi_min, args.xi_max, args.samples)
    written = []
    for lam in lambdas:
        table = phase_comparison(args.sigma, args.k, lam, xi)
        path = out / f"phases_sigma{args.sigma:g}_k{args.k:g}_lambda{lam:g}.csv"
        with open(path, "w") as fh:
            fh.write(f"# qtmirror_version={__version__}\n")
            fh.write(f"# sigma={args.sigma:.10g}\n# k={args.k:.10g}\n")
            fh.write(f"# lambda={lam:.10g}\n# best_shift={table['shift']:.10g}\n")
            fh.write("xi,phi_qtm,phi_ideal_shifted\n")
            for row in zip(table["xi"], table["phi_qtm"], table["phi_ideal_shifted"]):
                fh.write(",".join(f"{v:.10g}" for v in row) + "\n")
        written.append(path)
        if not args.quiet:
            center = table["phi_qtm"][np.argmin(np.abs(table["xi"]))]
            print(f"lambda={lam:g}: imprinted phase at center {center:.6g}, "
                  f"best shift {table['shift']:.6g} -> {path}")
    return 0


def _parse_float_list(raw: str, what: str) -> list[float]:
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad {what} list {raw!r}: {exc}") from exc


def run_validation_checks() -> list[tuple[str, float, float, bool]]:
    """Fast oracle/invariant suite; returns (name, measured, bound, ok) rows."""
    rng = np.random.default_rng(20170913)
    checks: list[tuple[str, float, float, bool]] = []

    def add(name, measured, bound, larger_is_better=False):
        ok = measured >= bound if larger_is_better else measured <= bound
        checks.append((name, float(measured), float(bound), bool(ok)))

    g = make_grid(1, (-16.0, 28.0), 2048)
    f = rng.normal(size=g.n) + 1j * rng.normal(size=g.n)
    back = np.fft.ifft(np.fft.fft(f))
    add("transform_roundtrip_rel_l2",
        np.linalg.norm(back - f) / np.linalg.norm(f), 1e-12)

    fk = np.fft.fft(f)
    add("parseval_rel",
        abs(np.sum(np.abs(f) ** 2) - np.sum(np.abs(fk) ** 2) / g.n)
        / np.sum(np.abs(f) ** 2), 1e-12)

    # moderate grid: rounding in the off-mode bins is amplified by nyquist^2
    g_pw = make_grid(1, (-16.0, 16.0), 512)
    q = 2 * np.pi * 20 / g_pw.length
    wave = np.exp(1j * q * g_pw.axis)
    lap = np.fft.ifft(-g_pw.k_squared * np.fft.fft(wave))
    add("plane_wave_laplacian_rel",
        np.linalg.norm(lap + q**2 * wave) / np.linalg.norm(q**2 * wave), 1e-12)

    spec = PacketSpec1D(sigma=1.0, k=4.0)
    wf0 = gaussian_1d(spec, g)
    add("free_oracle_1d_l2",
        l2_distance(free_segment(wf0, 1.0), gaussian_free_1d(spec, 1.0, g)), 1e-8)

    from .mirror import apply_kick, current_jump
    from .wavefunction import current

    wf1 = free_segment(wf0, 1.0)
    kicked = apply_kick(wf1, 40.0)
    add("kick_density_drift", np.max(np.abs(density(kicked) - density(wf1))), 0.0)
    add("kick_norm_drift", abs(norm(kicked) - norm(wf1)), 0.0)

    dj = current(kicked) - current(wf1)
    dj_ref = current_jump(wf1, 40.0)
    add("current_jump_rel_l2",
        np.linalg.norm(dj - dj_ref) / np.linalg.norm(dj_ref), 1e-8)

    pulse = PulseProfile("gaussian", 40.0, 1.0, 0.001)
    finals = []
    for div in (50, 100, 200):
        plan = EvolutionPlan(t_end=1.05, dt=1e-3 * 1.05, dt_pulse=pulse.width / div)
        finals.append(evolve(wf0, pulse, plan).psi)
    e1 = np.linalg.norm(finals[0] - finals[1])
    e2 = np.linalg.norm(finals[1] - finals[2])
    add("strang_order", np.log2(e1 / e2), 1.9, larger_is_better=True)

    plan = EvolutionPlan(t_end=1.05, dt=1.05e-3, dt_pulse=pulse.width / 50)
    norms = []
    evolve(wf0, pulse, plan, sink=lambda t, wf: norms.append(norm(wf)))
    add("norm_drift_run", max(abs(n - 1.0) for n in norms), 1e-9)

    kick_ref = free_segment(apply_kick(free_segment(wf0, 1.0), 40.0), 0.05)
    gaps = []
    for width in (1e-3, 5e-4, 2.5e-4):
        p = PulseProfile("gaussian", 40.0, 1.0, width)
        pl = EvolutionPlan(t_end=1.05, dt=1.05e-3, dt_pulse=width / 50)
        gaps.append(l2_distance(evolve(wf0, p, pl), kick_ref))
    add("pulse_to_kick_monotone", float(gaps[0] > gaps[1] > gaps[2]), 1.0,
        larger_is_better=True)

    ctx = li7_context()
    add("units_roundtrip_rel",
        abs(ctx.length_from_sigma(ctx.sigma_from_length(1e-5)) - 1e-5) / 1e-5, 1e-12)

    return checks


def cmd_validate(args) -> int:
    checks = run_validation_checks()
    failed = 0
    for name, measured, bound, ok in checks:
        status = "PASS" if ok else "FAIL"
        if not ok:
            failed += 1
        if not args.quiet or not ok:
            print(f"{status} {name}: measured={measured:.6g} bound={bound:.6g}")
    print(f"validation: {len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


def _parse_context_file(path) -> LabContext:
    import configparser

    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read context {path}: {exc}") from exc
    if not parser.has_section("context"):
        raise ConfigError(f"{path}: missing [context] section")
    sec = parser["context"]
    if "mass_kg" in sec:
        mass = float(sec["mass_kg"])
    elif "mass_u" in sec:
        mass = float(sec["mass_u"]) * ATOMIC_MASS_UNIT
    else:
        raise ConfigError(f"{path}: [context] needs mass_kg or mass_u")

    def opt(key):
        return float(sec[key]) if key in sec else None

    if "t0" not in sec:
        raise ConfigError(f"{path}: [context] needs t0 (seconds)")
    return LabContext(
        mass=mass,
        t0=float(sec["t0"]),
        a_perp=opt("a_perp"),
        atom_number=opt("atom_number"),
        kick_duration=opt("kick_duration"),
    )


def cmd_units(args) -> int:
    ctx = _parse_context_file(args.context) if args.context else li7_context()
    print(f"mass = {ctx.mass:.6g} kg, t0 = {ctx.t0:.6g} s")
    print(f"length unit  = {ctx.length_unit:.6g} m")
    print(f"velocity unit = {ctx.velocity_unit:.6g} m/s")
    for raw in _parse_float_list(args.lengths, "lengths") if args.lengths else []:
        print(f"length {raw:.6g} m -> sigma = {ctx.sigma_from_length(raw):.6g}")
    for raw in _parse_float_list(args.velocities, "velocities") if args.velocities else []:
        print(f"velocity {raw:.6g} m/s -> k = {ctx.k_from_velocity(raw):.6g}")
    lambdas = _parse_float_list(args.lambdas, "lambdas") if args.lambdas else []
    if lambdas:
        print("lambda -> required scattering length")
        for lam in lambdas:
            print(f"  {lam:10g} -> {ctx.scattering_length(lam):.6g} m")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="qtm", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qtm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output directory (default: $QTM_OUT or qtm_out)")
        p.add_argument("--quiet", action="store_true")

    p_run = sub.add_parser("run", help="single evolution from a config file")
    p_run.add_argument("--config", required=True, help="config path or bundled preset name")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="parameter sweep from a config file")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--workers", type=int, default=1)
    common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_phases = sub.add_parser("phases", help="imprinted vs ideal-reversal phase tables")
    p_phases.add_argument("--sigma", type=float, required=True)
    p_phases.add_argument("--k", type=float, required=True)
    p_phases.add_argument("--lambdas", required=True, help="comma-separated kick strengths")
    p_phases.add_argument("--xi-min", type=float, default=-6.0)
    p_phases.add_argument("--xi-max", type=float, default=6.0)
    p_phases.add_argument("--samples", type=int, default=401)
    common(p_phases)
    p_phases.set_defaults(func=cmd_phases)

    p_val = sub.add_parser("validate", help="run the oracle/invariant suite")
    common(p_val)
    p_val.set_defaults(func=cmd_validate)

    p_units = sub.add_parser("units", help="dimensionless <-> laboratory conversions")
    p_units.add_argument("--context", default=None, help="INI file with a [context] section")
    p_units.add_argument("--lambdas", default=None)
    p_units.add_argument("--lengths", default=None, help="comma-separated lengths in meters")
    p_units.add_argument("--velocities", default=None, help="comma-separated velocities in m/s")
    common(p_units)
    p_units.set_defaults(func=cmd_units)

    p_presets = sub.add_parser("presets", help="list bundled preset configs")
    common(p_presets)
    p_presets.set_defaults(func=lambda args: (print("\n".join(list_presets())), 0)[1])

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BoundaryContaminationError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        raise
    except Exception as exc:  # internal error
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
