"""Manufactured-solution convergence harness for the unit-shift resolvent.

The exact fields and the data f1..f7 come from the generated module
``_mms_exact`` (see scripts/derive_mms.py).  The exact solution satisfies
every interface condition that the weak form imposes naturally (slip law,
normal stress balance, pressure flux balances), so the only inconsistency
left is discretization error.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _mms_exact as ex
from .elements import eval_basis, map_to_physical, tensor_rule
from .evolution import resolvent_solve
from .forms import MaterialParams, Operators, build_operators, cell_dofs
from .initial import plate_interpolant
from .mesh import build_mesh

# field -> (layer, family, cell-dof key, ncomp, exact function)
ERROR_FIELDS = {
    "eta": ("biot", "trilinear", "eta", 3, ex.eta),
    "zeta": ("biot", "trilinear", "eta", 3, ex.zeta),
    "pb": ("biot", "trilinear", "pb", 1, ex.pb),
    "w": ("plate", "hermite_plate", "w", 1, None),
    "v": ("plate", "hermite_plate", "w", 1, None),
    "pp": ("pore", "prism", "pp", 1, ex.pp),
    "u": ("fluid", "triquadratic", "u", 3, ex.u),
    "pi": ("fluid", "trilinear", "pi", 1, ex.pi),
}
TRILINEAR_FIELDS = ("eta", "zeta", "pb", "pp", "pi")


def _hermite_fn(fn):
    return lambda p, h, x, y: fn(p, h, x, y)[:1]


_PLATE_EXACT = {"w": _hermite_fn(ex.w_hermite), "v": _hermite_fn(ex.v_hermite)}


def _nodal(layer, fn, p, h, order=1):
    X = layer.node_coords(order)
    return np.stack(fn(p, h, *X.T), axis=1).ravel()


def _hermite_data(mesh, fn, p, h):
    return plate_interpolant(mesh, *[(lambda k: lambda x, y: fn(p, h, x, y)[k])(k) for k in range(4)])


def resolvent_data(ops: Operators) -> dict:
    """Data f1..f7 for the manufactured solution on ``ops.mesh``.

    f1 and f4 are nodal interpolants made consistent with the trace
    constraints; the rest are callables integrated by quadrature.
    """
    m, p, L = ops.mesh, ops.params, ops.layout
    h = m.h_p
    f1 = _nodal(m.biot, ex.f1, p, h)
    f4 = _hermite_data(m, ex.f4_hermite, p, h)
    consistent = L.expand(L.restrict({"eta": f1, "w": f4}))

    def bind(fn):
        def g(*X):
            out = fn(p, h, *X)
            return out if len(out) > 1 else out[0]

        return g

    return {
        "f1": consistent["eta"],
        "f2": bind(ex.f2),
        "f3": bind(ex.f3),
        "f4": consistent["w"],
        "f5": bind(ex.f5),
        "f6": bind(ex.f6),
        "f7": bind(ex.f7),
    }


def l2_error(mesh, field_name: str, coeffs: np.ndarray, params: MaterialParams, order: int = 5) -> float:
    """L2 norm of (discrete - exact) by tensor Gauss quadrature with ``order`` points per direction."""
    layer_name, family, key, ncomp, fn = ERROR_FIELDS[field_name]
    if fn is None:
        fn = _PLATE_EXACT[field_name]
    layer = mesh.layers[layer_name]
    rule = tensor_rule((order,) * layer.dim)
    tab = map_to_physical(layer.extents, eval_basis(family, rule))
    X = layer.cell_origins()[:, None, :] + rule.points[None] * layer.extents
    dofs = cell_dofs(mesh)[key]
    nb = tab.values.shape[1]
    exact = fn(params, mesh.h_p, *[X[..., d] for d in range(layer.dim)])
    total = 0.0
    for c in range(ncomp):
        idx = dofs if ncomp == 1 else dofs.reshape(-1, nb, ncomp)[:, :, c]
        uh = coeffs[idx] @ tab.values.T
        total += float(np.einsum("q,cq->", tab.weights, (uh - exact[c]) ** 2))
    return float(np.sqrt(total))


def mms_errors(ops: Operators) -> dict:
    y = resolvent_solve(ops, resolvent_data(ops))
    raw = y.raw(ops.layout)
    return {f: l2_error(ops.mesh, f, raw[f], ops.params) for f in ERROR_FIELDS}


@dataclass
class ConvergenceTable:
    n_planes: tuple
    errors: dict  # field -> list of errors
    orders: dict = field(default_factory=dict)  # field -> list of pairwise orders

    def min_order(self, fields=TRILINEAR_FIELDS) -> float:
        return float(min(min(self.orders[f]) for f in fields))

    def rows(self):
        for i, n in enumerate(self.n_planes):
            yield n, {f: (self.errors[f][i], self.orders[f][i - 1] if i else None) for f in self.errors}

    def format(self) -> str:
        names = list(self.errors)
        head = "n".rjust(4) + "".join(f"{f:>12}{'rate':>7}" for f in names)
        lines = [head]
        for n, vals in self.rows():
            cells = "".join(f"{e:12.3e}{'' if r is None else f'{r:7.2f}':>7}" for e, r in vals.values())
            lines.append(f"{n:4d}{cells}")
        return "\n".join(lines)


def convergence_study(n_planes=(2, 4, 8), params: MaterialParams | None = None, h_p: float = 0.2,
                      threads: int = 0) -> ConvergenceTable:
    """Refine all layers together (nz_b = nz_f = ns_p = n_plane) and record L2 errors."""
    params = params or MaterialParams()
    errs = {f: [] for f in ERROR_FIELDS}
    for n in n_planes:
        mesh = build_mesh(n, n, n, n, h_p)
        ops = build_operators(mesh, params, threads)
        for f, e in mms_errors(ops).items():
            errs[f].append(e)
    ratio = np.log([n_planes[i + 1] / n_planes[i] for i in range(len(n_planes) - 1)])
    orders = {f: list(np.log(np.array(e[:-1]) / np.array(e[1:])) / ratio) for f, e in errs.items()}
    return ConvergenceTable(tuple(n_planes), errs, orders)


__all__ = ["ConvergenceTable", "ERROR_FIELDS", "TRILINEAR_FIELDS", "convergence_study", "l2_error",
           "mms_errors", "resolvent_data"]
