"""Reference elements on axis-aligned boxes and tensor Gauss rules.

All reference cells are unit boxes ``[0, 1]^d``.  Families:

``trilinear``      Q1 hexahedron, local node ``a + 2b + 4c``
``triquadratic``   Q2 hexahedron, local node ``a + 3b + 9c``
``prism``          plate-pressure cell: bilinear in-plane times linear in s
                   (same tables as ``trilinear``, third axis is s)
``hermite_plate``  bicubic Hermite rectangle, 4 DOFs per corner
                   (value, d/dx, d/dy, d2/dxdy), local DOF ``4*(a + 2b) + k``
``bilinear``       Q1 quadrilateral (face traces)
``biquadratic``    Q2 quadrilateral (face traces)
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

FAMILY_DIM = {
    "trilinear": 3,
    "triquadratic": 3,
    "prism": 3,
    "hermite_plate": 2,
    "bilinear": 2,
    "biquadratic": 2,
}


@dataclass(frozen=True)
class QuadRule:
    """Tensor Gauss rule on the unit box.

    Attributes
    ----------
    points : (nq, dim) reference coordinates in [0, 1]^dim
    weights : (nq,) positive weights summing to 1
    orders : points per direction
    """

    points: np.ndarray
    weights: np.ndarray
    orders: tuple

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def degree(self) -> tuple:
        """Per-direction polynomial exactness."""
        return tuple(2 * n - 1 for n in self.orders)


@lru_cache(maxsize=None)
def _gauss_1d(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def tensor_rule(orders: Sequence[int]) -> QuadRule:
    """Anisotropic tensor Gauss rule, first coordinate varying fastest."""
    orders = tuple(int(n) for n in orders)
    if any(n < 1 for n in orders):
        raise ValueError(f"quadrature order must be >= 1, got {orders}")
    xs = [_gauss_1d(n)[0] for n in orders]
    ws = [_gauss_1d(n)[1] for n in orders]
    grids = np.meshgrid(*xs[::-1], indexing="ij")
    pts = np.stack([g.ravel() for g in grids[::-1]], axis=1)
    wgrid = np.meshgrid(*ws[::-1], indexing="ij")
    w = np.prod(np.stack([g.ravel() for g in wgrid]), axis=0)
    pts.setflags(write=False)
    w.setflags(write=False)
    return QuadRule(pts, w, orders)


def quadrature_rule(dimension: int, order: int) -> QuadRule:
    """Isotropic tensor Gauss-Legendre rule with ``order`` points per direction."""
    if dimension not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2 or 3, got {dimension}")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    return tensor_rule((order,) * dimension)


# 1D shape functions: rows are basis functions, evaluated at t

def _lin(t):
    v = np.stack([1.0 - t, t])
    d = np.stack([-np.ones_like(t), np.ones_like(t)])
    dd = np.zeros_like(v)
    return v, d, dd


def _quad(t):
    v = np.stack([2.0 * (t - 0.5) * (t - 1.0), -4.0 * t * (t - 1.0), 2.0 * t * (t - 0.5)])
    d = np.stack([4.0 * t - 3.0, 4.0 - 8.0 * t, 4.0 * t - 1.0])
    dd = np.stack([np.full_like(t, 4.0), np.full_like(t, -8.0), np.full_like(t, 4.0)])
    return v, d, dd


def _hermite(t):
    # order: value@0, slope@0, value@1, slope@1 (unit interval)
    v = np.stack([1 - 3 * t**2 + 2 * t**3, t - 2 * t**2 + t**3, 3 * t**2 - 2 * t**3, -(t**2) + t**3])
    d = np.stack([-6 * t + 6 * t**2, 1 - 4 * t + 3 * t**2, 6 * t - 6 * t**2, -2 * t + 3 * t**2])
    dd = np.stack([-6 + 12 * t, -4 + 6 * t, 6 - 12 * t, -2 + 6 * t])
    return v, d, dd


@dataclass(frozen=True)
class BasisTable:
    """Basis data at quadrature points.

    ``values`` is (nq, nb), ``grads`` is (nq, nb, dim).  For the plate family
    ``hess`` holds (nq, nb, 3) second derivatives ordered (xx, yy, xy).
    """

    family: str
    rule: QuadRule
    values: np.ndarray
    grads: np.ndarray
    hess: np.ndarray | None = None

    @property
    def nbasis(self) -> int:
        return self.values.shape[1]


def _lagrange_tensor(points, oned):
    dim = points.shape[1]
    tabs = [oned(points[:, i]) for i in range(dim)]
    n1 = tabs[0][0].shape[0]
    idx = np.indices((n1,) * dim).reshape(dim, -1)[::-1]  # first axis fastest
    nb = idx.shape[1]
    nq = points.shape[0]
    vals = np.ones((nq, nb))
    grads = np.ones((nq, nb, dim))
    for i in range(dim):
        v, d, _ = tabs[i]
        vi = v[idx[i]].T
        di = d[idx[i]].T
        vals *= vi
        for j in range(dim):
            grads[:, :, j] *= di if j == i else vi
    return vals, grads


def _hermite_tensor(points):
    vx, dx, ddx = _hermite(points[:, 0])
    vy, dy, ddy = _hermite(points[:, 1])
    # per corner (a, b) and dof k: 1D index (value or slope) in each direction
    ix, iy = [], []
    for b in (0, 1):
        for a in (0, 1):
            for k in range(4):
                ix.append(2 * a + (k & 1))
                iy.append(2 * b + (k >> 1))
    ix = np.array(ix)
    iy = np.array(iy)
    vals = (vx[ix] * vy[iy]).T
    grads = np.stack([(dx[ix] * vy[iy]).T, (vx[ix] * dy[iy]).T], axis=2)
    hess = np.stack([(ddx[ix] * vy[iy]).T, (vx[ix] * ddy[iy]).T, (dx[ix] * dy[iy]).T], axis=2)
    return vals, grads, hess


def eval_basis(family: str, rule: QuadRule | np.ndarray) -> BasisTable:
    """Evaluate a reference family at the points of ``rule`` (or raw points)."""
    if family not in FAMILY_DIM:
        raise ValueError(f"unknown element family {family!r}")
    if isinstance(rule, QuadRule):
        pts = rule.points
    else:
        pts = np.atleast_2d(np.asarray(rule, dtype=float))
        rule = QuadRule(pts, np.full(len(pts), np.nan), ())
    if pts.shape[1] != FAMILY_DIM[family]:
        raise ValueError(f"{family} needs {FAMILY_DIM[family]}D points, got {pts.shape[1]}D")
    hess = None
    if family in ("trilinear", "prism", "bilinear"):
        vals, grads = _lagrange_tensor(pts, _lin)
    elif family in ("triquadratic", "biquadratic"):
        vals, grads = _lagrange_tensor(pts, _quad)
    else:
        vals, grads, hess = _hermite_tensor(pts)
    return BasisTable(family, rule, vals, grads, hess)


@dataclass(frozen=True)
class PhysicalTable:
    """Basis data mapped onto a physical box of given extents."""

    values: np.ndarray
    grads: np.ndarray
    weights: np.ndarray
    hess: np.ndarray | None = None


def hermite_dof_scale(extents) -> np.ndarray:
    """Per-DOF scaling that turns unit-cell Hermite slopes into physical ones."""
    hx, hy = extents[0], extents[1]
    return np.tile(np.array([1.0, hx, hy, hx * hy]), 4)


def map_to_physical(extents, table: BasisTable) -> PhysicalTable:
    """Affine map from the unit box to a box with the given edge lengths."""
    ext = np.asarray(extents, dtype=float)
    if ext.shape != (table.grads.shape[2],):
        raise ValueError(f"extents {ext} do not match a {table.grads.shape[2]}D family")
    if np.any(ext <= 0) or not np.all(np.isfinite(ext)):
        raise ValueError(f"degenerate cell with extents {ext}")
    vol = float(np.prod(ext))
    vals = table.values
    grads = table.grads / ext
    hess = None
    if table.family == "hermite_plate":
        s = hermite_dof_scale(ext)
        vals = vals * s
        grads = grads * s[None, :, None]
        inv = np.array([1 / ext[0] ** 2, 1 / ext[1] ** 2, 1 / (ext[0] * ext[1])])
        hess = table.hess * s[None, :, None] * inv
    return PhysicalTable(vals, grads, table.rule.weights * vol, hess)
