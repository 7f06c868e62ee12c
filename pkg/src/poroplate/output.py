"""Result emission: energy CSV traces, legacy ASCII VTK snapshots, JSON check summaries.

Each writer has a matching reader so outputs can be round-tripped in tests.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evolution import ENERGY_COLUMNS, StateVector
from .forms import Operators

ENERGY_HEADER = ("t", "E") + ENERGY_COLUMNS + ("D_diss", "J", "identity_residual")

HEXAHEDRON, QUAD = 12, 9
# reference local order (x fastest) -> VTK corner order
_HEX_ORDER = np.array([0, 1, 3, 2, 4, 5, 7, 6])
_QUAD_ORDER = np.array([0, 1, 3, 2])


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _open_for_write(path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path.open("w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# ---------------------------------------------------------------------------
# CSV

def write_energy_csv(reports, path, include_pi: bool | None = None) -> Path:
    """One row per step; a trailing ``Pi`` column is added for nonlinear runs."""
    reports = list(reports)
    if include_pi is None:
        include_pi = any(r.Pi is not None for r in reports)
    header = list(ENERGY_HEADER) + (["Pi"] if include_pi else [])
    with _open_for_write(path) as fh:
        fh.write(",".join(header) + "\n")
        for r in reports:
            row = r.row() + ([r.Pi or 0.0] if include_pi else [])
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return Path(path)


def read_energy_csv(path) -> dict:
    """Column name -> float array."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body]) if body else np.zeros((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}


# ---------------------------------------------------------------------------
# VTK

def _lattice_hexes(shape):
    """Hexahedra of a node lattice with ``shape`` cells per direction (x fastest)."""
    nx, ny, nz = shape
    i, j, k = np.indices((nx, ny, nz)).reshape(3, -1)
    order = np.lexsort((i, j, k))
    i, j, k = i[order], j[order], k[order]
    loc = np.indices((2, 2, 2)).reshape(3, -1)[::-1]  # x fastest
    I = i[:, None] + loc[0]
    J = j[:, None] + loc[1]
    K = k[:, None] + loc[2]
    nodes = I + (nx + 1) * (J + (ny + 1) * K)
    return nodes[:, _HEX_ORDER]


def _plate_quads(n):
    j, i = np.divmod(np.arange(n * n), n)
    loc = np.array([[0, 0], [1, 0], [0, 1], [1, 1]])
    nodes = (i[:, None] + loc[:, 0]) + (n + 1) * (j[:, None] + loc[:, 1])
    return nodes[:, _QUAD_ORDER]


def _q1_on_q2(values, shape):
    """Trilinear field on the Q1 lattice sampled at the Q2 lattice nodes."""
    nx, ny, nz = shape
    a = values.reshape(nz + 1, ny + 1, nx + 1)
    for axis in range(3):
        n = a.shape[axis]
        out_shape = list(a.shape)
        out_shape[axis] = 2 * n - 1
        b = np.empty(out_shape)
        sl_even = [slice(None)] * 3
        sl_odd = [slice(None)] * 3
        sl_even[axis] = slice(0, None, 2)
        sl_odd[axis] = slice(1, None, 2)
        b[tuple(sl_even)] = a
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        b[tuple(sl_odd)] = 0.5 * (a[tuple(lo)] + a[tuple(hi)])
        a = b
    return a.ravel()


@dataclass
class VtkData:
    points: np.ndarray
    cells: list
    cell_types: np.ndarray
    point_data: dict


def _write_vtk(path, title, points, cells, ctype, scalars: dict, vectors: dict):
    with _open_for_write(path) as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(f"{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {len(points)} double\n")
        for p in points:
            fh.write(" ".join(_fmt(c) for c in p) + "\n")
        nper = cells.shape[1]
        fh.write(f"CELLS {len(cells)} {len(cells) * (nper + 1)}\n")
        for c in cells:
            fh.write(f"{nper} " + " ".join(str(int(v)) for v in c) + "\n")
        fh.write(f"CELL_TYPES {len(cells)}\n")
        fh.write("\n".join([str(ctype)] * len(cells)) + "\n")
        fh.write(f"POINT_DATA {len(points)}\n")
        for name, vals in scalars.items():
            fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            fh.write("\n".join(_fmt(v) for v in vals) + "\n")
        for name, vals in vectors.items():
            fh.write(f"VECTORS {name} double\n")
            for v in np.asarray(vals).reshape(-1, 3):
                fh.write(" ".join(_fmt(c) for c in v) + "\n")
    return Path(path)


def write_vtk_snapshot(ops: Operators, state: StateVector, prefix) -> dict:
    """Write ``<prefix>_{biot,fluid,plate,pore}.vtk``; returns layer -> path."""
    m = ops.mesh
    raw = state.raw(ops.layout)
    prefix = str(prefix)
    out = {}
    b = m.biot
    out["biot"] = _write_vtk(f"{prefix}_biot.vtk", f"biot layer t={_fmt(state.t)}", b.node_coords(1),
                             _lattice_hexes(b.shape), HEXAHEDRON, {"pb": raw["pb"]},
                             {"eta": raw["eta"], "zeta": raw["zeta"]})
    f = m.fluid
    out["fluid"] = _write_vtk(f"{prefix}_fluid.vtk", f"fluid layer t={_fmt(state.t)}", f.node_coords(2),
                              _lattice_hexes(tuple(2 * n for n in f.shape)), HEXAHEDRON,
                              {"pi": _q1_on_q2(raw["pi"], f.shape)}, {"u": raw["u"]})
    pl = m.plate
    X = pl.node_coords(1)
    pts = np.column_stack([X, np.zeros(len(X))])
    out["plate"] = _write_vtk(f"{prefix}_plate.vtk", f"plate t={_fmt(state.t)}", pts, _plate_quads(m.n_plane),
                              QUAD, {"w": raw["w"][0::4], "v": raw["v"][0::4]}, {})
    po = m.pore
    out["pore"] = _write_vtk(f"{prefix}_pore.vtk", f"plate pressure (x, y, s) t={_fmt(state.t)}", po.node_coords(1),
                             _lattice_hexes(po.shape), HEXAHEDRON, {"pp": raw["pp"]}, {})
    return out


def read_vtk(path) -> VtkData:
    """Parse the legacy ASCII unstructured grids written above."""
    lines = [ln.strip() for ln in Path(path).read_text().split("\n")]
    pos = 4
    points = cells = types = None
    pdata = {}
    npts = 0
    while pos < len(lines):
        ln = lines[pos]
        if not ln:
            pos += 1
            continue
        head = ln.split()
        key = head[0]
        if key == "POINTS":
            npts = int(head[1])
            points = np.array([[float(v) for v in lines[pos + 1 + i].split()] for i in range(npts)])
            pos += 1 + npts
        elif key == "CELLS":
            nc = int(head[1])
            cells = [[int(v) for v in lines[pos + 1 + i].split()[1:]] for i in range(nc)]
            pos += 1 + nc
        elif key == "CELL_TYPES":
            nc = int(head[1])
            types = np.array([int(lines[pos + 1 + i]) for i in range(nc)])
            pos += 1 + nc
        elif key == "POINT_DATA":
            pos += 1
        elif key == "SCALARS":
            pdata[head[1]] = np.array([float(lines[pos + 2 + i]) for i in range(npts)])
            pos += 2 + npts
        elif key == "VECTORS":
            pdata[head[1]] = np.array([[float(v) for v in lines[pos + 1 + i].split()] for i in range(npts)])
            pos += 1 + npts
        else:
            raise ValueError(f"{path}: unexpected section {key!r} at line {pos + 1}")
    return VtkData(points, cells, types, pdata)


# ---------------------------------------------------------------------------
# JSON check summaries

def check_record(name: str, value, tolerance, passed: bool, **extra) -> dict:
    rec = {"name": name, "value": _jsonable(value), "tolerance": _jsonable(tolerance), "pass": bool(passed)}
    rec.update({k: _jsonable(v) for k, v in extra.items()})
    return rec


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, float) and not np.isfinite(v):
        return str(v)
    return v


def write_summary(records, path) -> Path:
    with _open_for_write(path) as fh:
        json.dump(list(records), fh, indent=2)
        fh.write("\n")
    return Path(path)


def read_summary(path) -> list:
    return json.loads(Path(path).read_text())


__all__ = ["ENERGY_HEADER", "VtkData", "check_record", "read_energy_csv", "read_summary", "read_vtk",
           "write_energy_csv", "write_summary", "write_vtk_snapshot"]
