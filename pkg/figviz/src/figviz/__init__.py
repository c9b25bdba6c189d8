"""Figure regeneration for quantum-time-mirror simulation outputs."""

__version__ = "0.1.0"

from .io import SchemaError, Table, read_table
from .render import render_heatmap, render_phases, render_snapshots, render_timeseries

__all__ = [
    "__version__",
    "SchemaError",
    "Table",
    "read_table",
    "render_heatmap",
    "render_phases",
    "render_snapshots",
    "render_timeseries",
]
