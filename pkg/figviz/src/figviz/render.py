"""Figure renderers: one function per figure kind.

All renderers are pure functions of their input files: fixed figure
geometry, deterministic colors keyed by the kick strength recorded in
each file's header, constant PNG metadata.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import (
    ECHO_COLUMNS,
    PHASES_COLUMNS,
    SNAPSHOT_1D_COLUMNS,
    SNAPSHOT_2D_COLUMNS,
    SWEEP_COLUMNS_TAIL,
    SchemaError,
    Table,
    expect_columns,
    read_table,
)

SAVE_KWARGS = dict(dpi=150, metadata={"Software": "figviz"})

# fixed palette cycled in sorted-strength order, so one strength keeps one
# color in every panel of a regeneration batch
PALETTE = plt.get_cmap("tab10").colors


def color_map(strengths) -> dict[float, tuple]:
    ordered = sorted(set(float(s) for s in strengths))
    return {s: PALETTE[i % len(PALETTE)] for i, s in enumerate(ordered)}


def _lam(table: Table) -> float:
    value = table.meta_float("lambda")
    if value is None:
        raise SchemaError(f"{table.path}: header lacks the kick strength (lambda=...)")
    return value


def render_timeseries(paths, out_path) -> None:
    """Norm-correlation traces N(t), one curve per kick strength."""
    tables = [read_table(p) for p in paths]
    for t in tables:
        expect_columns(t, ECHO_COLUMNS)
    colors = color_map(_lam(t) for t in tables)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for t in sorted(tables, key=_lam):
        lam = _lam(t)
        ax.plot(t.col("t"), t.col("norm_corr"), color=colors[lam], lw=1.4,
                label=f"$\\lambda$ = {lam:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("norm correlation N(t)")
    ax.set_ylim(0.0, 1.02)
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(out_path, **SAVE_KWARGS)
    plt.close(fig)


def _snapshot_profile(table: Table):
    """Radial/linear density and current profiles from a snapshot table."""
    if table.columns == SNAPSHOT_1D_COLUMNS:
        return table.col("x"), table.col("rho"), table.col("j")
    if table.columns == SNAPSHOT_2D_COLUMNS:
        # slice along the positive x axis (y = 0 row) for a radial profile
        y = table.col("y")
        x = table.col("x")
        on_axis = (np.abs(y) < 1e-12) & (x >= 0)
        if not np.any(on_axis):
            raise SchemaError(f"{table.path}: no y=0 slice available")
        order = np.argsort(x[on_axis])
        return x[on_axis][order], table.col("rho")[on_axis][order], table.col("j_r")[on_axis][order]
    raise SchemaError(
        f"{table.path}: columns {table.columns} match neither snapshot schema"
    )


def render_snapshots(paths, out_path) -> None:
    """Two panels: density profiles, and current right around the pulse.

    The initial state is drawn dashed black, the pre-pulse state
    dash-dotted black, post-pulse/peak states in the strength color.
    """
    tables = [read_table(p) for p in paths]
    colors = color_map(_lam(t) for t in tables)
    fig, (ax_rho, ax_j) = plt.subplots(2, 1, figsize=(7.0, 6.0), sharex=True)
    for t in sorted(tables, key=lambda t: (_lam(t), t.meta_float("snapshot_time") or 0.0)):
        x, rho, j = _snapshot_profile(t)
        when = t.meta_float("snapshot_time") or 0.0
        t0 = t.meta_float("pulse_t0") or 1.0
        lam = _lam(t)
        if when <= 0.5 * t0:
            ax_rho.plot(x, rho, "k--", lw=1.0, label=f"t = {when:g}")
            ax_j.plot(x, j, "k--", lw=1.0, label=f"t = {when:g}")
        elif when < t0:
            ax_rho.plot(x, rho, "k-.", lw=1.0, label=f"t = {when:g}")
        elif when < t0 + 0.1:
            ax_j.plot(x, j, color=colors[lam], lw=1.2,
                      label=f"$\\lambda$ = {lam:g}, t = {when:g}")
        else:
            ax_rho.plot(x, rho, color=colors[lam], lw=1.2,
                        label=f"$\\lambda$ = {lam:g}, t = {when:g}")
    ax_rho.set_ylabel(r"density $\rho$")
    ax_j.set_ylabel("current")
    ax_j.set_xlabel("position")
    ax_j.axhline(0.0, color="0.7", lw=0.6)
    for ax in (ax_rho, ax_j):
        ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, **SAVE_KWARGS)
    plt.close(fig)


def render_phases(paths, out_path) -> None:
    """Imprinted phase (solid) vs shifted ideal-reversal phase (dashed)."""
    tables = [read_table(p) for p in paths]
    for t in tables:
        expect_columns(t, PHASES_COLUMNS)
    colors = color_map(_lam(t) for t in tables)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for t in sorted(tables, key=_lam):
        lam = _lam(t)
        ax.plot(t.col("xi"), t.col("phi_qtm"), color=colors[lam], lw=1.4,
                label=f"imprinted, $\\lambda$ = {lam:g}")
        ax.plot(t.col("xi"), t.col("phi_ideal_shifted"), color=colors[lam],
                lw=1.0, ls="--", label=f"ideal + shift, $\\lambda$ = {lam:g}")
    phi_max = max(np.max(t.col("phi_qtm")) for t in tables)
    ax.set_ylim(-1.5 * phi_max if phi_max > 0 else -1, 1.5 * phi_max if phi_max > 0 else 1)
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel("phase")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, **SAVE_KWARGS)
    plt.close(fig)


def render_heatmap(data_path, overlay_path, out_path, require_overlay=True) -> None:
    """Echo-strength map over the two swept axes, threshold curve on top.

    Prints the color-scale bounds (data min/max) to stdout.
    """
    table = read_table(data_path)
    if len(table.columns) != 5 or table.columns[2:] != SWEEP_COLUMNS_TAIL:
        raise SchemaError(
            f"{table.path}: columns {table.columns} do not match the sweep schema"
        )
    name1, name2 = table.columns[:2]
    v1 = np.unique(table.col(name1))
    v2 = np.unique(table.col(name2))
    strength = np.full((len(v1), len(v2)), np.nan)
    i = np.searchsorted(v1, table.col(name1))
    j = np.searchsorted(v2, table.col(name2))
    strength[i, j] = table.col("peak_strength")

    vmin = float(np.nanmin(strength))
    vmax = float(np.nanmax(strength))
    print(f"heatmap color scale: min={vmin:.6g} max={vmax:.6g}")

    # strength axis (lambda) vertical when present, matching the paper layout
    transpose = name1 == "lambda"
    x_vals, y_vals = (v2, v1) if transpose else (v1, v2)
    x_name, y_name = (name2, name1) if transpose else (name1, name2)
    grid_c = strength if transpose else strength.T

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    mesh = ax.pcolormesh(x_vals, y_vals, grid_c, shading="nearest",
                         cmap="viridis", vmin=vmin, vmax=vmax)
    fig.colorbar(mesh, ax=ax, label="echo strength")

    if overlay_path is not None:
        overlay = read_table(overlay_path)
        if overlay.columns != [x_name, "lambda_min"]:
            raise SchemaError(
                f"{overlay.path}: overlay columns {overlay.columns} do not match "
                f"['{x_name}', 'lambda_min']"
            )
        ax.plot(overlay.col(x_name), overlay.col("lambda_min"), "k-", lw=1.6,
                label="analytic threshold")
        ax.legend(frameon=False, fontsize=9, loc="upper left")
        ax.set_ylim(y_vals.min(), y_vals.max())
    elif require_overlay:
        raise SchemaError("heatmap needs an overlay file (pass --no-overlay to skip)")

    ax.set_xlabel(x_name)
    ax.set_ylabel(y_name)
    fig.tight_layout()
    fig.savefig(out_path, **SAVE_KWARGS)
    plt.close(fig)
