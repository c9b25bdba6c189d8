"""Readers for the simulator's documented CSV schemas.

Every file starts with commented `# key=value` lines (the producing
config), one column-header line, then numeric rows. This module knows
only those schemas; it has no knowledge of how the numbers were made.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ECHO_COLUMNS = ["t", "norm_corr", "norm"]
SNAPSHOT_1D_COLUMNS = ["x", "re", "im", "rho", "j"]
SNAPSHOT_2D_COLUMNS = ["x", "y", "re", "im", "rho", "j_r"]
PHASES_COLUMNS = ["xi", "phi_qtm", "phi_ideal_shifted"]
SWEEP_COLUMNS_TAIL = ["peak_strength", "peak_time", "reversed_fraction"]


class SchemaError(ValueError):
    """Input file does not match a documented schema."""


@dataclass
class Table:
    path: str
    meta: dict[str, str]
    columns: list[str]
    data: np.ndarray  # shape (rows, len(columns))

    def col(self, name: str) -> np.ndarray:
        try:
            return self.data[:, self.columns.index(name)]
        except ValueError as exc:
            raise SchemaError(f"{self.path}: missing column {name!r}") from exc

    def meta_float(self, key: str, default: float | None = None) -> float | None:
        if key in self.meta:
            try:
                return float(self.meta[key])
            except ValueError:
                return default
        return default


def read_table(path) -> Table:
    meta: dict[str, str] = {}
    columns: list[str] | None = None
    rows: list[list[float]] = []
    with open(path) as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    meta[key.strip()] = value.strip()
                continue
            if columns is None:
                columns = [c.strip() for c in line.split(",")]
                continue
            parts = line.split(",")
            if len(parts) != len(columns):
                raise SchemaError(
                    f"{path}:{line_no}: expected {len(columns)} fields, got {len(parts)}"
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise SchemaError(f"{path}:{line_no}: non-numeric field: {exc}") from exc
    if columns is None:
        raise SchemaError(f"{path}: empty file (no column header)")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return Table(path=str(path), meta=meta, columns=columns, data=np.asarray(rows))


def expect_columns(table: Table, expected: list[str]) -> None:
    if table.columns != expected:
        raise SchemaError(
            f"{table.path}: columns {table.columns} do not match schema {expected}"
        )
