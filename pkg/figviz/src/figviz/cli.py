"""figviz: regenerate paper-style figures from simulator CSV files.

    figviz timeseries --in run_a_echo.csv run_b_echo.csv --out fig1a.png
    figviz snapshots  --in run_a_snap_*.csv --out fig1b.png
    figviz phases     --in phases_*.csv --out fig2.png
    figviz heatmap    --in sweep_x.csv --overlay sweep_x_overlay.csv --out fig1c.png
    figviz all        --run-dir runs/ --out-dir figures/
"""

from __future__ import annotations

import argparse
import sys
from collections import defaultdict
from pathlib import Path

from .io import SchemaError, read_table
from .render import render_heatmap, render_phases, render_snapshots, render_timeseries


def cmd_all(run_dir: Path, out_dir: Path) -> int:
    """Regenerate every figure the run directory has inputs for."""
    out_dir.mkdir(parents=True, exist_ok=True)
    made = []

    echo_groups = defaultdict(list)  # geometry -> echo CSVs
    snap_groups = defaultdict(list)  # run tag -> snapshot CSVs
    for path in sorted(run_dir.glob("run_*_echo.csv")):
        geometry = read_table(path).meta.get("geometry", "unknown")
        echo_groups[geometry].append(path)
    for path in sorted(run_dir.glob("run_*_snap_*.csv")):
        tag = path.name.split("_snap_")[0]
        snap_groups[tag].append(path)

    for geometry, paths in sorted(echo_groups.items()):
        target = out_dir / f"timeseries_{geometry}.png"
        render_timeseries(paths, target)
        made.append(target)

    merged_snaps = [p for _, group in sorted(snap_groups.items()) for p in group]
    if merged_snaps:
        target = out_dir / "snapshots.png"
        render_snapshots(merged_snaps, target)
        made.append(target)

    phase_files = sorted(run_dir.glob("phases_*.csv"))
    if phase_files:
        target = out_dir / "phases.png"
        render_phases(phase_files, target)
        made.append(target)

    for data in sorted(run_dir.glob("sweep_*.csv")):
        if data.name.endswith("_overlay.csv"):
            continue
        overlay = data.with_name(data.stem + "_overlay.csv")
        target = out_dir / f"heatmap_{data.stem}.png"
        render_heatmap(data, overlay if overlay.exists() else None, target,
                       require_overlay=False)
        made.append(target)

    if not made:
        print(f"no renderable inputs found in {run_dir}", file=sys.stderr)
        return 1
    for path in made:
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="figviz", description=__doc__)
    sub = parser.add_subparsers(dest="kind", required=True)

    for kind in ("timeseries", "snapshots", "phases"):
        p = sub.add_parser(kind)
        p.add_argument("--in", dest="inputs", nargs="+", required=True)
        p.add_argument("--out", required=True)

    p_heat = sub.add_parser("heatmap")
    p_heat.add_argument("--in", dest="inputs", nargs=1, required=True)
    p_heat.add_argument("--overlay", default=None)
    p_heat.add_argument("--no-overlay", action="store_true",
                        help="render without a threshold curve (strength not swept)")
    p_heat.add_argument("--out", required=True)

    p_all = sub.add_parser("all")
    p_all.add_argument("--run-dir", required=True)
    p_all.add_argument("--out-dir", required=True)

    args = parser.parse_args(argv)
    try:
        if args.kind == "timeseries":
            render_timeseries(args.inputs, args.out)
        elif args.kind == "snapshots":
            render_snapshots(args.inputs, args.out)
        elif args.kind == "phases":
            render_phases(args.inputs, args.out)
        elif args.kind == "heatmap":
            render_heatmap(
                args.inputs[0],
                args.overlay,
                args.out,
                require_overlay=not args.no_overlay,
            )
        else:
            return cmd_all(Path(args.run_dir), Path(args.out_dir))
        print(f"wrote {args.out}")
        return 0
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
