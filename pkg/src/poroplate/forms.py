"""Bilinear forms, Gram and energy matrices, and load vectors.

Assembly happens on raw DOFs (see ``dofs``) with unit coefficients; material
parameters are applied afterwards and constraints enter through
``P.T @ X @ P``.  Every cell in a layer has the same extents, so each element
matrix is computed once per layer and scattered.

Sigma-level matrices (free coordinates, blocks eta, pb, w, pp, u):

``M``  inertia/storage  rho_b, c_b, rho_p, c_p, rho_f mass terms
``S``  elastic          a_E on eta, D (lap, lap) + gamma mass on w
``Dm`` dissipative      k_b grad-grad, k_p d/ds-d/ds, 2 mu_f sym-grad, BJS slip
``C``  coupling         antisymmetric by construction (C + C.T == 0 exactly)

Resolvent at unit shift: ``A = M + S + Dm + C``.
Velocity step of size dt:  ``A = M/dt + dt*S + Dm + C``.
"""
from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .dofs import BLOCKS, DofLayout, build_dof_layout
from .elements import eval_basis, map_to_physical, tensor_rule
from .mesh import Layer, MultilayerMesh


@dataclass(frozen=True)
class MaterialParams:
    """Physical coefficients; all must be strictly positive."""

    lambda_b: float = 1.0
    mu_b: float = 1.0
    rho_b: float = 1.0
    alpha_b: float = 1.0
    c_b: float = 1.0
    k_b: float = 1.0
    D_plate: float = 1.0
    gamma: float = 1.0
    rho_p: float = 1.0
    alpha_p: float = 1.0
    c_p: float = 1.0
    k_p: float = 1.0
    rho_f: float = 1.0
    mu_f: float = 1.0
    beta_bjs: float = 1.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"material parameter {f.name} must be > 0 (non-degenerate regime), got {v}")

    def replace(self, **kw) -> "MaterialParams":
        return dataclasses.replace(self, **kw)


# ---------------------------------------------------------------------------
# element kernels (pure functions of cell extents)

def _vector_grads(grads: np.ndarray) -> np.ndarray:
    """(nq, nb, 3) scalar gradients -> (nq, 3*nb, 3, 3) gradients of vector basis.

    Vector DOF ``3*a + i`` is ``phi_a e_i`` whose gradient is ``e_i (x) grad phi_a``.
    """
    nq, nb, d = grads.shape
    G = np.zeros((nq, nb, d, d, d))
    for i in range(d):
        G[:, :, i, i, :] = grads
    return G.reshape(nq, nb * d, d, d)


def _sym(G):
    return 0.5 * (G + np.swapaxes(G, -1, -2))


def scalar_kernels(family: str, extents, order: int) -> dict:
    tab = map_to_physical(extents, eval_basis(family, tensor_rule((order,) * 3)))
    w, N, dN = tab.weights, tab.values, tab.grads
    return {
        "mass": np.einsum("q,qa,qb->ab", w, N, N),
        "lap": np.einsum("q,qai,qbi->ab", w, dN, dN),
        "dz": np.einsum("q,qa,qb->ab", w, dN[:, :, 2], dN[:, :, 2]),
    }


def vector_kernels(family: str, extents, order: int) -> dict:
    tab = map_to_physical(extents, eval_basis(family, tensor_rule((order,) * 3)))
    w = tab.weights
    G = _vector_grads(tab.grads)
    E = _sym(G)
    div = np.trace(G, axis1=2, axis2=3)
    out = {
        "symgrad2": 2.0 * np.einsum("q,qakl,qbkl->ab", w, E, E),
        "divdiv": np.einsum("q,qa,qb->ab", w, div, div),
        "gradgrad": np.einsum("q,qakl,qbkl->ab", w, G, G),
        # (sym grad eta, grad k) with eta the trial: row k (test), column eta
        "sym_vs_grad": np.einsum("q,qbkl,qakl->ab", w, E, G),
        "mass": np.kron(np.einsum("q,qa,qb->ab", w, tab.values, tab.values), np.eye(3)),
    }
    return out


def div_kernel(vel_family: str, extents, order: int) -> np.ndarray:
    """(8, 3*nb) matrix of int q (div v) with q trilinear, v of ``vel_family``."""
    rule = tensor_rule((order,) * 3)
    tv = map_to_physical(extents, eval_basis(vel_family, rule))
    tq = map_to_physical(extents, eval_basis("trilinear", rule))
    div = np.trace(_vector_grads(tv.grads), axis1=2, axis2=3)
    return np.einsum("q,qa,qb->ab", tq.weights, tq.values, div)


def plate_kernels(extents) -> dict:
    tab = map_to_physical(extents, eval_basis("hermite_plate", tensor_rule((4, 4))))
    w, N, H = tab.weights, tab.values, tab.hess
    lap = H[:, :, 0] + H[:, :, 1]
    return {
        "mass": np.einsum("q,qa,qb->ab", w, N, N),
        "laplap": np.einsum("q,qa,qb->ab", w, lap, lap),
    }


def moment_kernel(plate_ext, s0: float, ds: float) -> np.ndarray:
    """(16, 8): int_cell (int_{s0}^{s0+ds} s p(x,y,s) ds) lap xi(x,y), p trilinear in (x,y,s)."""
    rule = tensor_rule((4, 4, 2))
    tp = map_to_physical((plate_ext[0], plate_ext[1], ds), eval_basis("prism", rule))
    th = map_to_physical(plate_ext, eval_basis("hermite_plate", tensor_rule((4, 4))))
    lap = th.hess[:, :, 0] + th.hess[:, :, 1]
    nq2 = lap.shape[0]
    s = s0 + ds * rule.points[:, 2]
    # integrate s first at each in-plane point, then pair with lap xi
    Kp = (tp.weights * s)[:, None] * tp.values  # (nq3, 8)
    Kp = Kp.reshape(2, nq2, 8).sum(axis=0) / th.weights[:, None]
    return np.einsum("q,qa,qb->ab", th.weights, lap, Kp)


def moment_adjoint_kernel(plate_ext, s0: float, ds: float) -> np.ndarray:
    """(8, 16): int_cell int_layer (s lap w) q ds, assembled independently of ``moment_kernel``."""
    rule = tensor_rule((4, 4, 2))
    tp = map_to_physical((plate_ext[0], plate_ext[1], ds), eval_basis("prism", rule))
    inplane = rule.points[:, :2]
    th = map_to_physical(plate_ext, eval_basis("hermite_plate", inplane))
    lap = th.hess[:, :, 0] + th.hess[:, :, 1]  # (nq3, 16)
    s = s0 + ds * rule.points[:, 2]
    return np.einsum("q,qa,qb->ab", tp.weights * s, tp.values, lap)


def interface_kernels(plate_ext) -> dict:
    rule = tensor_rule((4, 4))
    th = map_to_physical(plate_ext, eval_basis("hermite_plate", rule))
    tl = map_to_physical(plate_ext, eval_basis("bilinear", rule))
    tq = map_to_physical(plate_ext, eval_basis("biquadratic", rule))
    w = th.weights
    return {
        "q_xi": np.einsum("q,qa,qb->ab", w, tl.values, th.values),  # (4, 16)
        "q_u": np.einsum("q,qa,qb->ab", w, tl.values, tq.values),  # (4, 9)
        "u_u": np.einsum("q,qa,qb->ab", w, tq.values, tq.values),  # (9, 9)
        "q_1": np.einsum("q,qa->a", w, tl.values),
    }


# ---------------------------------------------------------------------------
# scatter helpers

def _scatter(Ke, rdofs, cdofs, shape) -> sp.csr_matrix:
    nc, nr = rdofs.shape
    ncl = cdofs.shape[1]
    rows = np.broadcast_to(rdofs[:, :, None], (nc, nr, ncl)).ravel()
    cols = np.broadcast_to(cdofs[:, None, :], (nc, nr, ncl)).ravel()
    data = np.broadcast_to(Ke, (nc, nr, ncl)).ravel()
    return sp.coo_matrix((data, (rows, cols)), shape=shape).tocsr()


def _vec_dofs(nodes, ncomp=3):
    return (nodes[:, :, None] * ncomp + np.arange(ncomp)).reshape(nodes.shape[0], -1)


def cell_dofs(mesh: MultilayerMesh) -> dict:
    """Raw DOF indices per cell for every field (reference local ordering)."""
    fl = mesh.fluid
    q2 = fl.cell_nodes(2)
    top = q2[:, 18:27]  # c = 2 face of the triquadratic cell
    pore_nodes = mesh.pore.cell_nodes(1)
    ic = mesh.interface_cells
    return {
        "eta": _vec_dofs(mesh.biot.cell_nodes(1)),
        "pb": mesh.biot.cell_nodes(1),
        "w": _vec_dofs(mesh.plate.cell_nodes(1), 4),
        "pp": pore_nodes,
        "u": _vec_dofs(q2),
        "pi": fl.cell_nodes(1),
        "pp_bottom": pore_nodes[ic["pore_bottom"]][:, :4],
        "u_top": top[ic["fluid"]],
    }


def _raw_sizes(mesh: MultilayerMesh) -> dict:
    nb = int(np.prod(mesh.biot.lattice_shape(1)))
    return {
        "eta": 3 * nb,
        "pb": nb,
        "w": 4 * int(np.prod(mesh.plate.lattice_shape(1))),
        "pp": int(np.prod(mesh.pore.lattice_shape(1))),
        "u": 3 * int(np.prod(mesh.fluid.lattice_shape(2))),
        "pi": int(np.prod(mesh.fluid.lattice_shape(1))),
    }


@dataclass(frozen=True, eq=False)
class RawForms:
    """Unit-coefficient raw matrices, keyed by a short name.

    Naming: ``<field>_<form>`` for diagonal blocks and
    ``<test>__<trial>_<form>`` for off-diagonal ones.
    """

    mesh: MultilayerMesh
    mats: dict
    sizes: dict
    dofs: dict = field(repr=False, default_factory=dict)

    def __getitem__(self, k):
        return self.mats[k]


def _biot_forms(mesh, dofs, sizes):
    ext = mesh.biot.extents
    sk = scalar_kernels("trilinear", ext, 2)
    vk = vector_kernels("trilinear", ext, 2)
    ck = div_kernel("trilinear", ext, 2)
    ne, npb = sizes["eta"], sizes["pb"]
    de, dp = dofs["eta"], dofs["pb"]
    return {
        "eta_mass": _scatter(vk["mass"], de, de, (ne, ne)),
        "eta_symgrad2": _scatter(vk["symgrad2"], de, de, (ne, ne)),
        "eta_divdiv": _scatter(vk["divdiv"], de, de, (ne, ne)),
        "pb_mass": _scatter(sk["mass"], dp, dp, (npb, npb)),
        "pb_lap": _scatter(sk["lap"], dp, dp, (npb, npb)),
        "pb__eta_div": _scatter(ck, dp, de, (npb, ne)),
    }


def _plate_forms(mesh, dofs, sizes):
    pk = plate_kernels(mesh.plate.extents)
    dw, nw = dofs["w"], sizes["w"]
    return {
        "w_mass": _scatter(pk["mass"], dw, dw, (nw, nw)),
        "w_laplap": _scatter(pk["laplap"], dw, dw, (nw, nw)),
    }


def _pore_forms(mesh, dofs, sizes):
    pore = mesh.pore
    sk = scalar_kernels("prism", pore.extents, 2)
    dp, npp, nw = dofs["pp"], sizes["pp"], sizes["w"]
    n2 = mesh.n_plane**2
    ds = pore.extents[2]
    mom = None
    for k in range(mesh.ns_p):
        Ke = moment_kernel(mesh.plate.extents, -mesh.h_p / 2 + k * ds, ds)
        part = _scatter(Ke, dofs["w"], dp[k * n2:(k + 1) * n2], (nw, npp))
        mom = part if mom is None else mom + part
    ik = interface_kernels(mesh.plate.extents)
    db = dofs["pp_bottom"]
    ut = _vec_dofs(dofs["u_top"])
    nu = sizes["u"]
    q_u = np.zeros((4, 27))
    q_u[:, 2::3] = ik["q_u"]
    tau = np.zeros((27, 27))
    for c in (0, 1):
        tau[c::3, c::3] = ik["u_u"]
    return {
        "pp_mass": _scatter(sk["mass"], dp, dp, (npp, npp)),
        "pp_ds": _scatter(sk["dz"], dp, dp, (npp, npp)),
        "w__pp_moment": mom.tocsr(),
        "pp__w_trace": _scatter(ik["q_xi"], db, dofs["w"], (npp, nw)),
        "pp__u_trace": _scatter(q_u, db, ut, (npp, nu)),
        "u_slip": _scatter(tau, ut, ut, (nu, nu)),
    }


def _fluid_forms(mesh, dofs, sizes):
    ext = mesh.fluid.extents
    vk = vector_kernels("triquadratic", ext, 3)
    pk = scalar_kernels("trilinear", ext, 2)
    bk = div_kernel("triquadratic", ext, 3)
    du, dpi, nu, npi = dofs["u"], dofs["pi"], sizes["u"], sizes["pi"]
    return {
        "u_mass": _scatter(vk["mass"], du, du, (nu, nu)),
        "u_symgrad2": _scatter(vk["symgrad2"], du, du, (nu, nu)),
        "u_gradgrad": _scatter(vk["gradgrad"], du, du, (nu, nu)),
        "pi_mass": _scatter(pk["mass"], dpi, dpi, (npi, npi)),
        "pi__u_div": _scatter(bk, dpi, du, (npi, nu)),
    }


@lru_cache(maxsize=8)
def raw_forms(mesh: MultilayerMesh, threads: int = 0) -> RawForms:
    """All unit-coefficient raw matrices of the mesh.

    ``threads > 0`` assembles the four layers concurrently; every layer is
    assembled independently and merged by key, so the result is identical to
    the single-threaded one.
    """
    dofs = cell_dofs(mesh)
    sizes = _raw_sizes(mesh)
    jobs = (_biot_forms, _plate_forms, _pore_forms, _fluid_forms)
    if threads and threads > 0:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda f: f(mesh, dofs, sizes), jobs))
    else:
        parts = [f(mesh, dofs, sizes) for f in jobs]
    mats = {}
    for p in parts:
        mats.update(p)
    return RawForms(mesh, mats, sizes, dofs)


@lru_cache(maxsize=8)
def layout_for(mesh: MultilayerMesh) -> DofLayout:
    return build_dof_layout(mesh)


# ---------------------------------------------------------------------------
# Sigma-level operators

def _blockdiag(raw: RawForms, diag: dict) -> sp.csr_matrix:
    blocks = []
    for b in BLOCKS:
        m = diag.get(b)
        n = raw.sizes[b]
        blocks.append(m if m is not None else sp.csr_matrix((n, n)))
    return sp.block_diag(blocks, format="csr")


def _raw_blocks(raw: RawForms, entries: dict) -> sp.csr_matrix:
    grid = [[None] * len(BLOCKS) for _ in BLOCKS]
    for (r, c), m in entries.items():
        i, j = BLOCKS.index(r), BLOCKS.index(c)
        grid[i][j] = m if grid[i][j] is None else grid[i][j] + m
    for i, b in enumerate(BLOCKS):
        if grid[i][i] is None:
            grid[i][i] = sp.csr_matrix((raw.sizes[b], raw.sizes[b]))
    return sp.bmat(grid, format="csr")


def _restrict(layout: DofLayout, X: sp.spmatrix) -> sp.csr_matrix:
    P = layout.P
    return (P.T @ X @ P).tocsr()


def elastic_raw(raw: RawForms, p: MaterialParams):
    """a_E(eta, k) = 2 mu_b (D eta, D k) + lambda_b (div eta, div k)."""
    return p.mu_b * raw["eta_symgrad2"] + p.lambda_b * raw["eta_divdiv"]


def plate_stiffness_raw(raw: RawForms, p: MaterialParams):
    return p.D_plate * raw["w_laplap"] + p.gamma * raw["w_mass"]


def coupling_raw(raw: RawForms, p: MaterialParams) -> sp.csr_matrix:
    """Antisymmetric coupling; each pair is one matrix and its negated transpose."""
    cb = p.alpha_b * raw["pb__eta_div"]
    km = p.alpha_p * raw["w__pp_moment"]
    tw = raw["pp__w_trace"]
    tu = raw["pp__u_trace"]
    return _raw_blocks(
        raw,
        {
            ("pb", "eta"): cb,
            ("eta", "pb"): -cb.T,
            ("w", "pp"): km - tw.T,
            ("pp", "w"): -km.T + tw,
            ("pp", "u"): -tu,
            ("u", "pp"): tu.T,
        },
    )


@dataclass(frozen=True, eq=False)
class Operators:
    """Parameter-weighted operators in free coordinates for one mesh."""

    mesh: MultilayerMesh
    params: MaterialParams
    layout: DofLayout
    raw: RawForms
    M: sp.csr_matrix
    S: sp.csr_matrix
    Dm: sp.csr_matrix
    C: sp.csr_matrix
    B: sp.csr_matrix
    G: sp.csr_matrix
    M_pi: sp.csr_matrix
    energy_blocks: dict  # name -> (raw field, raw matrix)
    dissipation_blocks: dict

    def matrix(self, mode: str = "resolvent", value: float = 1.0) -> sp.csr_matrix:
        if not value > 0:
            raise ValueError(f"{mode} parameter must be positive, got {value}")
        if mode == "resolvent":
            if value != 1.0:
                raise ValueError("resolvent mode is only defined at unit shift")
            return (self.M + self.S + self.Dm + self.C).tocsr()
        if mode == "velocity":
            return (self.M / value + value * self.S + self.Dm + self.C).tocsr()
        raise ValueError(f"unknown mode {mode!r}")


@lru_cache(maxsize=8)
def build_operators(mesh: MultilayerMesh, params: MaterialParams, threads: int = 0) -> Operators:
    layout = layout_for(mesh)
    raw = raw_forms(mesh, threads)
    p = params
    aE = elastic_raw(raw, p)
    wS = plate_stiffness_raw(raw, p)
    Mraw = _blockdiag(
        raw,
        {
            "eta": p.rho_b * raw["eta_mass"],
            "pb": p.c_b * raw["pb_mass"],
            "w": p.rho_p * raw["w_mass"],
            "pp": p.c_p * raw["pp_mass"],
            "u": p.rho_f * raw["u_mass"],
        },
    )
    Sraw = _blockdiag(raw, {"eta": aE, "w": wS})
    Draw = _blockdiag(
        raw,
        {
            "pb": p.k_b * raw["pb_lap"],
            "pp": p.k_p * raw["pp_ds"],
            "u": p.mu_f * raw["u_symgrad2"] + p.beta_bjs * raw["u_slip"],
        },
    )
    Graw = _blockdiag(
        raw,
        {
            "eta": aE,
            "pb": raw["pb_lap"],
            "w": p.D_plate * raw["w_laplap"],
            "pp": raw["pp_mass"] + raw["pp_ds"],
            "u": p.mu_f * raw["u_gradgrad"],
        },
    )
    C = _restrict(layout, coupling_raw(raw, p))
    # exact antisymmetry after restriction: keep the strictly upper part and mirror it
    C = (sp.triu(C, 1) - sp.triu(C, 1).T).tocsr()
    Bu = -raw["pi__u_div"]
    zero_cols = [sp.csr_matrix((raw.sizes["pi"], raw.sizes[b])) for b in BLOCKS[:-1]]
    Braw = sp.hstack(zero_cols + [Bu], format="csr")
    B = (layout.P_pi.T @ Braw @ layout.P).tocsr()
    B.eliminate_zeros()
    M_pi = (layout.P_pi.T @ raw["pi_mass"] @ layout.P_pi).tocsr()
    energy_blocks = {
        "E_eta": ("eta", aE, "disp"),
        "E_zeta": ("eta", p.rho_b * raw["eta_mass"], "vel"),
        "E_pb": ("pb", p.c_b * raw["pb_mass"], "vel"),
        "E_w": ("w", wS, "disp"),
        "E_v": ("w", p.rho_p * raw["w_mass"], "vel"),
        "E_pp": ("pp", p.c_p * raw["pp_mass"], "vel"),
        "E_u": ("u", p.rho_f * raw["u_mass"], "vel"),
    }
    dissipation_blocks = {
        "D_pb": ("pb", p.k_b * raw["pb_lap"]),
        "D_pp": ("pp", p.k_p * raw["pp_ds"]),
        "D_u": ("u", p.mu_f * raw["u_symgrad2"]),
        "D_slip": ("u", p.beta_bjs * raw["u_slip"]),
    }
    return Operators(
        mesh=mesh,
        params=params,
        layout=layout,
        raw=raw,
        M=_restrict(layout, Mraw),
        S=_restrict(layout, Sraw),
        Dm=_restrict(layout, Draw),
        C=C,
        B=B,
        G=_restrict(layout, Graw),
        M_pi=M_pi,
        energy_blocks=energy_blocks,
        dissipation_blocks=dissipation_blocks,
    )


@dataclass(frozen=True, eq=False)
class SaddleSystem:
    """Block system [A B^T; B 0] [phi; pi] = [f; g]."""

    A: sp.csr_matrix
    B: sp.csr_matrix
    f: np.ndarray | None = None
    g: np.ndarray | None = None
    G: sp.csr_matrix | None = None
    mode: tuple = ("resolvent", 1.0)

    def with_load(self, f, g=None) -> "SaddleSystem":
        return dataclasses.replace(self, f=np.asarray(f, dtype=float), g=None if g is None else np.asarray(g, dtype=float))


def assemble_a(mesh: MultilayerMesh, layout: DofLayout, params: MaterialParams, mode=("resolvent", 1.0), threads: int = 0) -> SaddleSystem:
    """Sigma x Sigma form in resolvent (unit shift) or velocity-step mode."""
    ops = build_operators(mesh, params, threads)
    kind, value = mode
    A = ops.matrix(kind, value)
    return SaddleSystem(A=A, B=ops.B, G=ops.G, mode=(kind, value))


def assemble_b(mesh: MultilayerMesh, layout: DofLayout) -> sp.csr_matrix:
    """B_ij = -int chi_i div delta_j over the fluid layer (free coordinates)."""
    return build_operators(mesh, MaterialParams()).B


def assemble_gram(mesh: MultilayerMesh, layout: DofLayout, params: MaterialParams) -> sp.csr_matrix:
    return build_operators(mesh, params).G


def assemble_energy_matrices(mesh: MultilayerMesh, layout: DofLayout, params: MaterialParams) -> dict:
    """Energy split into velocity-type (M) and displacement-type (S) parts, plus dissipation."""
    ops = build_operators(mesh, params)
    return {"M": ops.M, "S": ops.S, "Dm": ops.Dm}


# ---------------------------------------------------------------------------
# loads

def _source_rule(family):
    return {"trilinear": 3, "prism": 3, "triquadratic": 4, "hermite_plate": 5}[family]


def integrate_source(layer: Layer, family: str, dofs: np.ndarray, size: int, fn: Callable, ncomp: int = 1) -> np.ndarray:
    """Raw load ``int fn * phi`` for a callable source evaluated at quadrature points."""
    order = _source_rule(family)
    rule = tensor_rule((order,) * layer.dim)
    tab = map_to_physical(layer.extents, eval_basis(family, rule))
    X = layer.cell_origins()[:, None, :] + rule.points[None] * layer.extents
    vals = fn(*[X[..., d] for d in range(layer.dim)])
    if ncomp == 1:
        vals = [vals]
    out = np.zeros(size)
    nb = tab.values.shape[1]
    for c in range(ncomp):
        fv = np.broadcast_to(np.asarray(vals[c], dtype=float), X.shape[:2])
        cell = np.einsum("cq,q,qa->ca", fv, tab.weights, tab.values)
        if ncomp == 1:
            idx = dofs
        else:
            idx = dofs.reshape(-1, nb, ncomp)[:, :, c]
        out += np.bincount(idx.ravel(), weights=cell.ravel(), minlength=size)
    return out


_FIELD_SPACE = {
    "eta": ("biot", "trilinear", "eta", 3, "eta_mass"),
    "pb": ("biot", "trilinear", "pb", 1, "pb_mass"),
    "w": ("plate", "hermite_plate", "w", 1, "w_mass"),
    "pp": ("pore", "prism", "pp", 1, "pp_mass"),
    "u": ("fluid", "triquadratic", "u", 3, "u_mass"),
}


def mass_pairing(ops: Operators, field_name: str, data) -> np.ndarray:
    """Raw vector of (data, phi_i) for raw nodal data or a callable source."""
    layer, fam, key, ncomp, mkey = _FIELD_SPACE[field_name]
    size = ops.raw.sizes[field_name]
    if data is None:
        return np.zeros(size)
    if callable(data):
        return integrate_source(ops.mesh.layers[layer], fam, ops.raw.dofs[key], size, data, ncomp)
    arr = np.asarray(data, dtype=float)
    if arr.shape != (size,):
        raise ValueError(f"data for {field_name} has shape {arr.shape}, expected ({size},)")
    return ops.raw[mkey] @ arr


def _check_raw(ops, name, arr):
    arr = np.asarray(arr, dtype=float)
    if arr.shape != (ops.raw.sizes[name],):
        raise ValueError(f"raw {name} array has shape {arr.shape}, expected ({ops.raw.sizes[name]},)")
    return arr


def _to_free(ops: Operators, parts: dict) -> np.ndarray:
    raw = np.concatenate([parts.get(b, np.zeros(ops.raw.sizes[b])) for b in BLOCKS])
    return ops.layout.P.T @ raw


def resolvent_load_raw(ops: Operators, data: dict) -> dict:
    """Raw parts of the unit-shift resolvent functional.

    Keys ``f1`` .. ``f7`` follow the state ordering (eta, zeta, pb, w, v, pp, u).
    ``f1`` and ``f4`` must be raw nodal arrays; the others may be arrays or
    callables.
    """
    unknown = set(data) - {f"f{i}" for i in range(1, 8)}
    if unknown:
        raise ValueError(f"unknown resolvent data keys {sorted(unknown)}")
    p = ops.params
    f1 = data.get("f1")
    f4 = data.get("f4")
    eta = p.rho_b * mass_pairing(ops, "eta", data.get("f2"))
    pb = p.c_b * mass_pairing(ops, "pb", data.get("f3"))
    w = p.rho_p * mass_pairing(ops, "w", data.get("f5"))
    pp = p.c_p * mass_pairing(ops, "pp", data.get("f6"))
    u = p.rho_f * mass_pairing(ops, "u", data.get("f7"))
    if f1 is not None:
        f1 = _check_raw(ops, "eta", f1)
        eta = eta + p.rho_b * (ops.raw["eta_mass"] @ f1)
        pb = pb + p.alpha_b * (ops.raw["pb__eta_div"] @ f1)
    if f4 is not None:
        f4 = _check_raw(ops, "w", f4)
        w = w + p.rho_p * (ops.raw["w_mass"] @ f4)
        pp = pp - p.alpha_p * (ops.raw["w__pp_moment"].T @ f4) + ops.raw["pp__w_trace"] @ f4
    return {"eta": eta, "pb": pb, "w": w, "pp": pp, "u": u}


FORCING_SLOTS = {"F_b": "eta", "S": "pb", "plate": "w", "plate_pressure": "pp", "F_f": "u"}


def forcing_load_raw(ops: Operators, forcing: dict | None) -> dict:
    """Raw loads of external sources: (F_b,k)+(S,q_b)+(plate,xi)+(plate_pressure,q_p)+(F_f,delta)."""
    out = {}
    if not forcing:
        return out
    unknown = set(forcing) - set(FORCING_SLOTS)
    if unknown:
        raise ValueError(f"unknown forcing slots {sorted(unknown)}")
    for slot, fld in FORCING_SLOTS.items():
        if forcing.get(slot) is not None:
            out[fld] = mass_pairing(ops, fld, forcing[slot])
    return out


def assemble_load(mesh: MultilayerMesh, layout: DofLayout, params: MaterialParams, mode, data: dict) -> np.ndarray:
    """Free load vector.

    ``mode=("resolvent", 1.0)`` with data keys f1..f7, or
    ``mode=("velocity", dt)`` with optional keys ``zeta, pb, v, pp, u`` (previous
    velocities as free block vectors), ``eta, w`` (previous displacements) and
    forcing slots ``F_b, S, F_f, plate, plate_pressure``.
    """
    ops = build_operators(mesh, params)
    kind, value = mode
    if not value > 0:
        raise ValueError(f"{kind} parameter must be positive, got {value}")
    if kind == "resolvent":
        return _to_free(ops, resolvent_load_raw(ops, data))
    if kind != "velocity":
        raise ValueError(f"unknown mode {kind!r}")
    L = layout
    prev_keys = {"zeta": "eta", "pb": "pb", "v": "w", "pp": "pp", "u": "u"}
    disp_keys = {"eta": "eta", "w": "w"}
    forcing = {k: v for k, v in data.items() if k in FORCING_SLOTS}
    other = set(data) - set(forcing) - set(prev_keys) - set(disp_keys)
    if other:
        raise ValueError(f"unknown velocity-form data keys {sorted(other)}")
    x = L.zeros()
    d = L.zeros()
    for k, b in prev_keys.items():
        if data.get(k) is not None:
            x[L.block(b)] = _check_block(L, b, data[k])
    for k, b in disp_keys.items():
        if data.get(k) is not None:
            d[L.block(b)] = _check_block(L, b, data[k])
    return ops.M @ x / value - ops.S @ d + _to_free(ops, forcing_load_raw(ops, forcing))


def _check_block(L: DofLayout, b: str, v):
    v = np.asarray(v, dtype=float)
    if v.shape != (L.block_sizes[b],):
        raise ValueError(f"block {b} expects {L.block_sizes[b]} entries, got {v.shape}")
    return v


def stokes_blocks(mesh: MultilayerMesh, velocity: str = "triquadratic", mu_f: float = 1.0):
    """Fluid-only (G_uu, B, M_pi) in free coordinates for a velocity family.

    The velocity is periodic in-plane and zero on the bottom wall; the pressure
    is trilinear and periodic.  ``velocity="trilinear"`` gives the
    equal-order pair used as a negative control.
    """
    from .mesh import periodic_partners

    fl = mesh.fluid
    order = {"trilinear": 1, "triquadratic": 2}[velocity]
    qorder = order + 1
    nodes = fl.cell_nodes(order)
    du = _vec_dofs(nodes)
    dpi = fl.cell_nodes(1)
    nnode = int(np.prod(fl.lattice_shape(order)))
    npi = int(np.prod(fl.lattice_shape(1)))
    vk = vector_kernels(velocity, fl.extents, qorder)
    bk = div_kernel(velocity, fl.extents, qorder)
    pk = scalar_kernels("trilinear", fl.extents, 2)
    K = _scatter(vk["gradgrad"], du, du, (3 * nnode, 3 * nnode))
    Braw = -_scatter(bk, dpi, du, (npi, 3 * nnode))
    Mpi = _scatter(pk["mass"], dpi, dpi, (npi, npi))

    rep = periodic_partners(fl, order)
    kz = np.indices(fl.lattice_shape(order)[::-1]).reshape(3, -1)[::-1][2]
    master = (rep == np.arange(nnode)) & (kz > 0)
    loc = np.full(nnode, -1)
    loc[master] = np.arange(int(master.sum()))
    g = loc[rep]
    g[kz == 0] = -1
    rows = np.flatnonzero(np.repeat(g, 3) >= 0)
    cols = (g[:, None] * 3 + np.arange(3)).ravel()[rows]
    Pu = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(3 * nnode, 3 * int(master.sum())))
    prep = periodic_partners(fl, 1)
    pm = prep == np.arange(npi)
    ploc = np.full(npi, -1)
    ploc[pm] = np.arange(int(pm.sum()))
    Pp = sp.csr_matrix((np.ones(npi), (np.arange(npi), ploc[prep])), shape=(npi, int(pm.sum())))
    G = (Pu.T @ (mu_f * K) @ Pu).tocsr()
    B = (Pp.T @ Braw @ Pu).tocsr()
    M = (Pp.T @ Mpi @ Pp).tocsr()
    return G, B, M
