import shutil
import subprocess
import sys

import numpy as np
import pytest

from figviz.cli import main
from figviz.io import SchemaError, read_table
from figviz.render import color_map


def write_echo_csv(path, lam, geometry="1d"):
    ts = np.linspace(0.0, 2.5, 120)
    ns = np.exp(-3 * ts) + (0.6 * np.exp(-((ts - 1.8) ** 2) / 0.02) if lam else 0.0)
    with open(path, "w") as fh:
        fh.write("# qtmirror_version=0.1.0\n")
        fh.write(f"# geometry={geometry}\n# lambda={lam}\n")
        fh.write("t,norm_corr,norm\n")
        for t, n in zip(ts, ns):
            fh.write(f"{t:.6g},{min(n, 1.0):.6g},1\n")
    return path


def write_snapshot_csv(path, lam, when, t0=1.0):
    xs = np.linspace(-8.0, 8.0, 160)
    rho = np.exp(-((xs - when) ** 2))
    j = np.gradient(rho, xs) * (-0.5)
    with open(path, "w") as fh:
        fh.write(f"# lambda={lam}\n# pulse_t0={t0}\n# snapshot_time={when}\n")
        fh.write("x,re,im,rho,j\n")
        for x, r, jj in zip(xs, rho, j):
            fh.write(f"{x:.6g},{np.sqrt(r):.6g},0,{r:.6g},{jj:.6g}\n")
    return path


def write_phases_csv(path, lam):
    xi = np.linspace(-4.0, 4.0, 100)
    with open(path, "w") as fh:
        fh.write(f"# lambda={lam}\n# best_shift=0.5\n")
        fh.write("xi,phi_qtm,phi_ideal_shifted\n")
        for x in xi:
            fh.write(f"{x:.6g},{lam * np.exp(-x * x):.6g},{x * x + 0.5:.6g}\n")
    return path


def write_sweep_csvs(data_path, overlay_path):
    lams = np.linspace(5.0, 60.0, 4)
    sigmas = np.linspace(0.5, 2.0, 3)
    with open(data_path, "w") as fh:
        fh.write("# geometry=1d\n")
        fh.write("lambda,sigma,peak_strength,peak_time,reversed_fraction\n")
        for lam in lams:
            for s in sigmas:
                strength = 0.6 if lam > 20 * s else 0.01
                fh.write(f"{lam:.6g},{s:.6g},{strength:.6g},1.9,0.3\n")
    with open(overlay_path, "w") as fh:
        fh.write("# geometry=1d\n")
        fh.write("sigma,lambda_min\n")
        for s in sigmas:
            fh.write(f"{s:.6g},{19.27 * s:.6g}\n")
    return data_path, overlay_path


@pytest.fixture()
def fig_inputs(tmp_path):
    """Inputs for all five paper-figure analogues."""
    inputs = {
        "fig1a": [write_echo_csv(tmp_path / f"run_{i}_echo.csv", lam) for i, lam in enumerate((0.0, 20.0, 40.0))],
        "fig1b": [
            write_snapshot_csv(tmp_path / "run_0_snap_t0.0000.csv", 40.0, 0.0),
            write_snapshot_csv(tmp_path / "run_0_snap_t0.9900.csv", 40.0, 0.99),
            write_snapshot_csv(tmp_path / "run_0_snap_t1.0100.csv", 40.0, 1.01),
            write_snapshot_csv(tmp_path / "run_0_snap_peak_t1.9000.csv", 40.0, 1.9),
        ],
        "fig2": [write_phases_csv(tmp_path / f"phases_lambda{lam:g}.csv", lam) for lam in (30.0, 40.0, 50.0)],
        "fig1c": write_sweep_csvs(tmp_path / "sweep_a.csv", tmp_path / "sweep_a_overlay.csv"),
        "fig3a": [write_echo_csv(tmp_path / f"run_2d_{i}_echo.csv", lam, "2d-ring") for i, lam in enumerate((3600.0, 4843.6))],
    }
    return tmp_path, inputs


def test_all_five_figure_kinds_render(fig_inputs, tmp_path, capsys):
    base, inputs = fig_inputs
    jobs = [
        (["timeseries", "--in", *map(str, inputs["fig1a"]), "--out", str(tmp_path / "fig1a.png")]),
        (["snapshots", "--in", *map(str, inputs["fig1b"]), "--out", str(tmp_path / "fig1b.png")]),
        (["phases", "--in", *map(str, inputs["fig2"]), "--out", str(tmp_path / "fig2.png")]),
        (["heatmap", "--in", str(inputs["fig1c"][0]), "--overlay", str(inputs["fig1c"][1]),
          "--out", str(tmp_path / "fig1c.png")]),
        (["timeseries", "--in", *map(str, inputs["fig3a"]), "--out", str(tmp_path / "fig3a.png")]),
    ]
    for argv in jobs:
        assert main(argv) == 0, argv
    for name in ("fig1a", "fig1b", "fig2", "fig1c", "fig3a"):
        assert (tmp_path / f"{name}.png").stat().st_size > 2000


def test_render_is_deterministic(fig_inputs, tmp_path):
    base, inputs = fig_inputs
    out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
    for out in (out1, out2):
        assert main(["timeseries", "--in", *map(str, inputs["fig1a"]), "--out", str(out)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_heatmap_prints_color_bounds(fig_inputs, tmp_path, capsys):
    base, inputs = fig_inputs
    data, overlay = inputs["fig1c"]
    assert main(["heatmap", "--in", str(data), "--overlay", str(overlay),
                 "--out", str(tmp_path / "h.png")]) == 0
    stdout = capsys.readouterr().out
    assert "color scale: min=0.01 max=0.6" in stdout


def test_heatmap_requires_overlay(fig_inputs, tmp_path):
    base, inputs = fig_inputs
    data, _ = inputs["fig1c"]
    assert main(["heatmap", "--in", str(data), "--out", str(tmp_path / "h.png")]) == 1
    assert main(["heatmap", "--in", str(data), "--no-overlay",
                 "--out", str(tmp_path / "h.png")]) == 0


def test_empty_csv_is_an_error(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["timeseries", "--in", str(empty), "--out", str(tmp_path / "x.png")]) == 1


def test_schema_mismatch_is_an_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("# lambda=40\na,b\n1,2\n")
    assert main(["timeseries", "--in", str(bad), "--out", str(tmp_path / "x.png")]) == 1
    from figviz.io import ECHO_COLUMNS, expect_columns

    with pytest.raises(SchemaError):
        expect_columns(read_table(bad), ECHO_COLUMNS)
    with pytest.raises(FileNotFoundError):
        read_table(tmp_path / "does_not_exist.csv")


def test_missing_lambda_header_is_an_error(tmp_path):
    path = tmp_path / "r_echo.csv"
    path.write_text("t,norm_corr,norm\n0,1,1\n1,0.5,1\n")
    assert main(["timeseries", "--in", str(path), "--out", str(tmp_path / "x.png")]) == 1


def test_color_coding_consistent_across_panels():
    # the same strength set yields the same color assignment in any order
    a = color_map([40.0, 0.0, 20.0])
    b = color_map([20.0, 40.0, 0.0])
    assert a == b
    assert len({a[k] for k in a}) == 3


def test_cmd_all_driver(fig_inputs, tmp_path):
    base, inputs = fig_inputs
    out_dir = tmp_path / "figs"
    assert main(["all", "--run-dir", str(base), "--out-dir", str(out_dir)]) == 0
    names = {p.name for p in out_dir.glob("*.png")}
    assert "timeseries_1d.png" in names
    assert "timeseries_2d-ring.png" in names
    assert "snapshots.png" in names
    assert "phases.png" in names
    assert any(n.startswith("heatmap_") for n in names)


def test_cmd_all_empty_dir(tmp_path):
    assert main(["all", "--run-dir", str(tmp_path), "--out-dir", str(tmp_path / "f")]) == 1


@pytest.mark.skipif(shutil.which("qtm") is None, reason="primary CLI not installed")
def test_end_to_end_with_primary(tmp_path):
    run_dir = tmp_path / "runs"
    cfg = tmp_path / "small.cfg"
    cfg.write_text(
        "[run]\ngeometry = 1d\nt_end = 1.9\n\n"
        "[grid]\nx_min = -24.0\nx_max = 40.0\npoints = 1024\n\n"
        "[packet]\nsigma = 1.0\nk = 4.0\n\n"
        "[pulse]\nkind = gaussian\nlambda = 40.0\nt0 = 1.0\nwidth = 0.001\n\n"
        "[evolution]\nsample_stride = 2\n\n"
        "[snapshots]\ntimes = 0, 0.99, 1.01, peak\n"
    )
    for cmd in (
        ["qtm", "run", "--config", str(cfg), "--out", str(run_dir), "--quiet"],
        ["qtm", "sweep", "--config", "sweep_smoke_2x2", "--out", str(run_dir), "--quiet"],
        ["qtm", "phases", "--sigma", "1", "--k", "4", "--lambdas", "30,40",
         "--out", str(run_dir), "--quiet"],
    ):
        proc = subprocess.run(cmd, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr

    out_dir = tmp_path / "figs"
    assert main(["all", "--run-dir", str(run_dir), "--out-dir", str(out_dir)]) == 0
    assert (out_dir / "timeseries_1d.png").exists()
    assert (out_dir / "snapshots.png").exists()
    assert (out_dir / "phases.png").exists()
    assert any(p.name.startswith("heatmap_") for p in out_dir.glob("*.png"))
