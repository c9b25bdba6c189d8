"""Wave-function snapshot files.

Binary format "QTMW", little-endian:
  magic 'QTMW' | u32 dim | u32 n per axis | f64 (min, max) per axis |
  f64 time | row-major interleaved (re, im) f64 amplitudes.

CSV snapshots carry coordinates, re, im, rho and the probability
current (column `j` in 1D, radial component `j_r` in 2D) so plotting
stays free of any spectral machinery.
"""

from __future__ import annotations

import struct

import numpy as np

from .grid import Grid
from .wavefunction import WaveFunction, current, density, radial_current

__all__ = ["write_qtmw", "read_qtmw", "write_snapshot_csv"]

MAGIC = b"QTMW"


def write_qtmw(path, wf: WaveFunction) -> None:
    grid = wf.grid
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", grid.dim))
        fh.write(struct.pack(f"<{grid.dim}I", *([grid.n] * grid.dim)))
        fh.write(struct.pack(f"<{2 * grid.dim}d", *([grid.x_min, grid.x_max] * grid.dim)))
        fh.write(struct.pack("<d", wf.t))
        fh.write(np.ascontiguousarray(wf.psi, dtype="<c16").tobytes())


def read_qtmw(path) -> WaveFunction:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"not a QTMW snapshot: bad magic {magic!r}")
        (dim,) = struct.unpack("<I", fh.read(4))
        if dim not in (1, 2):
            raise ValueError(f"unsupported dimension {dim}")
        ns = struct.unpack(f"<{dim}I", fh.read(4 * dim))
        extents = struct.unpack(f"<{2 * dim}d", fh.read(16 * dim))
        if len(set(ns)) != 1 or (dim == 2 and extents[:2] != extents[2:]):
            raise ValueError("QTMW grids must be square with one resolution")
        (t,) = struct.unpack("<d", fh.read(8))
        n = ns[0]
        data = np.frombuffer(fh.read(), dtype="<c16")
        if data.size != n**dim:
            raise ValueError(f"expected {n**dim} amplitudes, found {data.size}")
        grid = Grid(dim=dim, x_min=extents[0], x_max=extents[1], n=n)
        return WaveFunction(grid, data.reshape(grid.shape).astype(np.complex128), t=t)


def write_snapshot_csv(path, wf: WaveFunction, header_lines: list[str] = ()) -> None:
    rho = density(wf)
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        if wf.grid.dim == 1:
            j = current(wf)
            fh.write("x,re,im,rho,j\n")
            for x, a, r, jj in zip(wf.grid.axis, wf.psi, rho, j):
                fh.write(f"{x:.10g},{a.real:.10g},{a.imag:.10g},{r:.10g},{jj:.10g}\n")
        else:
            jr = radial_current(wf)
            x_col, y_col = np.meshgrid(wf.grid.axis, wf.grid.axis, indexing="ij")
            fh.write("x,y,re,im,rho,j_r\n")
            for x, y, a, r, jj in zip(
                x_col.ravel(), y_col.ravel(), wf.psi.ravel(), rho.ravel(), jr.ravel()
            ):
                fh.write(f"{x:.10g},{y:.10g},{a.real:.10g},{a.imag:.10g},{r:.10g},{jj:.10g}\n")
