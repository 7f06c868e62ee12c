"""Function-level moment operators of the plate pressure.

``K p (x, y) = int s p(x, y, s) ds`` maps a pore-layer pressure to an in-plane
field; ``Kt q (x, y, s) = s q(x, y)`` extends an in-plane field linearly in s.
They are adjoint: ``(K p, q)_plate = (p, Kt q)_pore``.  Both sides are
evaluated here on independent quadratures (in-plane 4x4 after an s-sum,
versus the pore-cell 4x4x2 rule) so their agreement is a genuine check.
"""
from __future__ import annotations

import numpy as np

from .elements import eval_basis, map_to_physical, tensor_rule
from .forms import cell_dofs
from .mesh import MultilayerMesh

_PLATE_RULE = tensor_rule((4, 4))
_PORE_RULE = tensor_rule((4, 4, 2))


def _plate_table(mesh):
    return map_to_physical(mesh.plate.extents, eval_basis("hermite_plate", _PLATE_RULE))


def plate_field_at_points(mesh: MultilayerMesh, xi, laplacian: bool = False) -> np.ndarray:
    """(ncell, 16) values of a plate field (or its Laplacian) at the in-plane rule."""
    tab = _plate_table(mesh)
    c = np.asarray(xi, dtype=float)[cell_dofs(mesh)["w"]]
    basis = tab.hess[:, :, 0] + tab.hess[:, :, 1] if laplacian else tab.values
    return c @ basis.T


def moment_of(mesh: MultilayerMesh, p) -> np.ndarray:
    """K p at the in-plane quadrature points of every plate cell, shape (ncell, 16)."""
    n2 = mesh.n_plane**2
    ds = mesh.pore.extents[2]
    s_rule = tensor_rule((2,))
    # prism basis on the (x, y) in-plane rule crossed with the s rule, s fastest last
    pts = np.array([[a, b, t] for t in s_rule.points[:, 0] for a, b in _PLATE_RULE.points])
    vals = eval_basis("prism", pts).values.reshape(2, 16, 8)
    nodes = cell_dofs(mesh)["pp"]
    p = np.asarray(p, dtype=float)
    out = np.zeros((n2, 16))
    for k in range(mesh.ns_p):
        s0 = mesh.pore.origin[2] + k * ds
        pk = p[nodes[k * n2:(k + 1) * n2]]  # (ncell, 8)
        for g in range(2):
            s = s0 + ds * s_rule.points[g, 0]
            out += (ds * s_rule.weights[g] * s) * (pk @ vals[g].T)
    return out


def moment_pairing(mesh: MultilayerMesh, p, xi, laplacian: bool = True) -> float:
    """(K p, q)_plate with q = Delta xi (or xi itself)."""
    tab = _plate_table(mesh)
    q = plate_field_at_points(mesh, xi, laplacian)
    return float(np.einsum("q,cq,cq->", tab.weights, moment_of(mesh, p), q))


def adjoint_pairing(mesh: MultilayerMesh, p, xi, laplacian: bool = True) -> float:
    """(p, Kt q)_pore evaluated with the 3D pore-cell rule."""
    n2 = mesh.n_plane**2
    tp = map_to_physical(mesh.pore.extents, eval_basis("prism", _PORE_RULE))
    th = map_to_physical(mesh.plate.extents, eval_basis("hermite_plate", _PORE_RULE.points[:, :2]))
    basis = th.hess[:, :, 0] + th.hess[:, :, 1] if laplacian else th.values
    c = np.asarray(xi, dtype=float)[cell_dofs(mesh)["w"]]
    qv = c @ basis.T  # (n2, nq3)
    nodes = cell_dofs(mesh)["pp"]
    p = np.asarray(p, dtype=float)
    total = 0.0
    for k in range(mesh.ns_p):
        s = mesh.pore.origin[2] + (k + _PORE_RULE.points[:, 2]) * mesh.pore.extents[2]
        pv = p[nodes[k * n2:(k + 1) * n2]] @ tp.values.T
        total += float(np.einsum("q,cq,cq->", tp.weights * s, pv, qv))
    return total


def pore_l2_norm(mesh: MultilayerMesh, p) -> float:
    tp = map_to_physical(mesh.pore.extents, eval_basis("prism", _PORE_RULE))
    pv = np.asarray(p, dtype=float)[cell_dofs(mesh)["pp"]] @ tp.values.T
    return float(np.sqrt(np.einsum("q,cq->", tp.weights, pv**2)))


def plate_l2_norm(mesh: MultilayerMesh, xi, laplacian: bool = True) -> float:
    tab = _plate_table(mesh)
    q = plate_field_at_points(mesh, xi, laplacian)
    return float(np.sqrt(np.einsum("q,cq->", tab.weights, q**2)))


__all__ = ["adjoint_pairing", "moment_of", "moment_pairing", "plate_field_at_points",
           "plate_l2_norm", "pore_l2_norm"]
