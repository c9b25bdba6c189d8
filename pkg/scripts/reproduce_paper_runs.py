#!/usr/bin/env python3
"""Drive every bundled preset to regenerate the paper-style data files.

Single runs and the phase tables take a couple of minutes combined; the
full sweeps are hours of compute and are skipped unless requested.

Usage:
    python scripts/reproduce_paper_runs.py --out runs/
    python scripts/reproduce_paper_runs.py --out runs/ --include-sweeps --workers 8
"""

import argparse
import sys
import time

from qtmirror.cli import list_presets, main as qtm

FAST_SWEEPS = {"sweep_smoke_2x2"}


def run(args):
    out = ["--out", args.out]
    failures = []

    for preset in list_presets():
        is_sweep = preset.startswith("sweep")
        if is_sweep and preset not in FAST_SWEEPS and not args.include_sweeps:
            print(f"skip {preset} (long sweep; pass --include-sweeps)")
            continue
        cmd = (
            ["sweep", "--config", preset, "--workers", str(args.workers)] + out
            if is_sweep
            else ["run", "--config", preset] + out
        )
        start = time.time()
        code = qtm(cmd)
        print(f"{preset}: exit {code} in {time.time() - start:.1f}s")
        if code != 0:
            failures.append(preset)

    code = qtm(["phases", "--sigma", "1", "--k", "4", "--lambdas", "30,40,50"] + out)
    print(f"phase tables: exit {code}")
    if code != 0:
        failures.append("phases")

    if failures:
        print(f"FAILED: {failures}")
        return 1
    print("all requested preset runs completed")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="qtm_out")
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--include-sweeps", action="store_true")
    sys.exit(run(parser.parse_args()))
