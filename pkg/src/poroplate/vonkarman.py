"""Von Karman plate nonlinearity: bracket, clamped Airy solve, restoring force.

Plate fields are raw Hermite coefficient arrays (4 per plate node).  The
bracket is evaluated at the 4x4 Gauss points of every plate cell, where it
is an exact polynomial product, so the trilinear form

    T(a, b, c) = int [a, b] c

is assembled exactly.  On clamped fields T is fully symmetric (the edge
terms of the cofactor integration by parts only involve tangential second
derivatives, which are continuous for C1 Hermite elements), hence the
discrete force is the exact negative gradient of the discrete potential.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse.linalg as spla

from .elements import eval_basis, map_to_physical, tensor_rule
from .evolution import StepResult, _advance, _forcing_at, forcing_load, identity_terms
from .forms import Operators, cell_dofs, layout_for, raw_forms
from .mesh import MultilayerMesh

PLATE_RULE = tensor_rule((4, 4))


class PicardError(RuntimeError):
    """Fixed-point loop failed; ``history`` holds the increment norms."""

    def __init__(self, msg, history=None):
        super().__init__(msg)
        self.history = list(history or [])


@dataclass(frozen=True, eq=False)
class PlateOps:
    mesh: MultilayerMesh
    dofs: np.ndarray  # (ncell, 16) raw w indices
    values: np.ndarray  # (nq, 16)
    hess: np.ndarray  # (nq, 16, 3) ordered xx, yy, xy
    weights: np.ndarray  # (nq,) physical weights, identical for every cell
    points: np.ndarray  # (ncell, nq, 2) physical quadrature points
    laplap: object  # raw (Delta., Delta.) matrix
    mass: object
    free: np.ndarray  # raw indices not clamped
    airy_lu: object  # factor of laplap on free indices

    @property
    def size(self) -> int:
        return self.laplap.shape[0]


@lru_cache(maxsize=8)
def plate_ops(mesh: MultilayerMesh) -> PlateOps:
    tab = map_to_physical(mesh.plate.extents, eval_basis("hermite_plate", PLATE_RULE))
    raw = raw_forms(mesh)
    K = raw["w_laplap"].tocsc()
    clamped = layout_for(mesh).essential_zeros["w"]
    free = np.flatnonzero(~clamped)
    lu = spla.splu(K[free][:, free].tocsc()) if free.size else None
    origins = mesh.plate.cell_origins()[:, :2]
    pts = origins[:, None, :] + PLATE_RULE.points[None, :, :] * mesh.plate.extents[:2]
    return PlateOps(mesh=mesh, dofs=cell_dofs(mesh)["w"], values=tab.values, hess=tab.hess,
                    weights=tab.weights, points=pts, laplap=K, mass=raw["w_mass"].tocsr(),
                    free=free, airy_lu=lu)


def _field(po: PlateOps, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (po.size,):
        raise ValueError(f"plate field must have {po.size} raw coefficients, got shape {w.shape}")
    return w


def second_derivatives(mesh: MultilayerMesh, w) -> np.ndarray:
    """(ncell, nq, 3) values of (w_xx, w_yy, w_xy) at the plate quadrature points."""
    po = plate_ops(mesh)
    c = _field(po, w)[po.dofs]
    return np.einsum("ca,qak->cqk", c, po.hess)


def plate_values(mesh: MultilayerMesh, w) -> np.ndarray:
    po = plate_ops(mesh)
    return _field(po, w)[po.dofs] @ po.values.T


def bracket(mesh: MultilayerMesh, u, w) -> np.ndarray:
    """[u, w] = u_xx w_yy + u_yy w_xx - 2 u_xy w_xy at the plate quadrature points, shape (ncell, nq)."""
    du = second_derivatives(mesh, u)
    dw = second_derivatives(mesh, w)
    return du[..., 0] * dw[..., 1] + du[..., 1] * dw[..., 0] - 2.0 * du[..., 2] * dw[..., 2]


def pair_with_tests(mesh: MultilayerMesh, qvals) -> np.ndarray:
    """Raw load (g, xi) for a field given by its quadrature-point values."""
    po = plate_ops(mesh)
    loc = np.einsum("q,cq,qa->ca", po.weights, qvals, po.values)
    out = np.zeros(po.size)
    np.add.at(out, po.dofs, loc)
    return out


def trilinear(mesh: MultilayerMesh, a, b, c) -> float:
    """int [a, b] c over the plate."""
    po = plate_ops(mesh)
    return float(np.einsum("q,cq,cq->", po.weights, bracket(mesh, a, b), plate_values(mesh, c)))


@dataclass(frozen=True)
class AirySolution:
    v: np.ndarray  # raw coefficients, clamped entries exactly zero
    residual: float  # relative residual of the clamped biharmonic system


def solve_biharmonic(mesh: MultilayerMesh, load) -> AirySolution:
    """Clamped solve of (Delta v, Delta xi) = (load, xi) for a raw load vector."""
    po = plate_ops(mesh)
    load = _field(po, load)
    v = np.zeros(po.size)
    if po.free.size == 0:
        return AirySolution(v, 0.0)
    rhs = load[po.free]
    try:
        v[po.free] = po.airy_lu.solve(rhs)
    except RuntimeError as exc:
        raise RuntimeError(f"clamped biharmonic factorization failed: {exc}") from exc
    r = po.laplap[po.free] @ v - rhs
    nr = np.linalg.norm(rhs)
    return AirySolution(v, float(np.linalg.norm(r) / nr) if nr > 0 else float(np.linalg.norm(r)))


def solve_airy(mesh: MultilayerMesh, w) -> AirySolution:
    """Airy stress function: (Delta v, Delta xi) = -([w, w], xi) on clamped xi."""
    return solve_biharmonic(mesh, -pair_with_tests(mesh, bracket(mesh, w, w)))


@dataclass(frozen=True, eq=False)
class VkConfig:
    F0: np.ndarray | None = None  # raw plate coefficients of the prestress function
    picard_tol: float = 1e-10
    picard_max: int = 50

    def __post_init__(self):
        if not self.picard_tol > 0:
            raise ValueError("picard_tol must be > 0")
        if self.picard_max < 1:
            raise ValueError("picard_max must be >= 1")


def _stress(mesh, v, cfg: VkConfig):
    return v if cfg.F0 is None else v + np.asarray(cfg.F0, dtype=float)


def vk_force(mesh: MultilayerMesh, w, cfg: VkConfig = VkConfig()) -> np.ndarray:
    """Raw plate load ([w, v(w) + F0], xi), zero on clamped DOFs."""
    po = plate_ops(mesh)
    w = _field(po, w)
    v = solve_airy(mesh, w).v
    out = pair_with_tests(mesh, bracket(mesh, w, _stress(mesh, v, cfg)))
    out[np.setdiff1d(np.arange(po.size), po.free)] = 0.0
    return out


def potential(mesh: MultilayerMesh, w, cfg: VkConfig = VkConfig()) -> float:
    """Pi(w) = 1/4 int |Delta v(w)|^2 - 1/2 int w [w, F0]."""
    po = plate_ops(mesh)
    w = _field(po, w)
    v = solve_airy(mesh, w).v
    val = 0.25 * float(v @ (po.laplap @ v))
    if cfg.F0 is not None:
        val -= 0.5 * trilinear(mesh, w, cfg.F0, w)
    return val


# ---------------------------------------------------------------------------
# nonlinear time step

def _vk_load(ops: Operators, w_raw, cfg) -> np.ndarray:
    L = ops.layout
    f = vk_force(ops.mesh, w_raw, cfg)
    return L.P[L.raw_block("w"), :].T @ f


def nonlinear_step(ops: Operators, state, dt: float, cfg: VkConfig, forcing=None) -> StepResult:
    """Velocity-form step with the plate force iterated to a fixed point in w."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    L = ops.layout
    ext = forcing_load(ops, _forcing_at(forcing, state.t + dt))
    w_iter = state.w
    history = []
    for it in range(1, cfg.picard_max + 1):
        load = ext + _vk_load(ops, L.expand(_w_only(L, w_iter))["w"], cfg)
        new = _advance(ops, state, dt, load)
        inc = float(np.linalg.norm(new.w - w_iter))
        history.append(inc)
        w_iter = new.w
        if inc <= cfg.picard_tol * max(1.0, float(np.linalg.norm(new.w))):
            break
    else:
        raise PicardError(f"Picard iteration did not converge in {cfg.picard_max} iterations (dt={dt})", history)
    # audit against the load actually solved with (last iterate's force)
    rep = identity_terms(ops, state, new, dt, load)
    rep = _with_pi(rep, potential(ops.mesh, L.expand(_w_only(L, new.w))["w"], cfg), it)
    return StepResult(new, rep, load)


def _w_only(L, w_free):
    x = L.zeros()
    x[L.block("w")] = w_free
    return x


def _with_pi(rep, Pi, iterations):
    return dataclasses.replace(rep, Pi=Pi, picard_iterations=iterations)


def step_nonlinear(ops: Operators, state, dt: float, cfg: VkConfig = VkConfig(), forcing=None):
    """One nonlinear step; returns (state, EnergyReport carrying Pi)."""
    res = nonlinear_step(ops, state, dt, cfg, forcing)
    return res.state, res.report


def plate_potential_of_state(ops: Operators, state, cfg: VkConfig = VkConfig()) -> float:
    L = ops.layout
    return potential(ops.mesh, L.expand(_w_only(L, state.w))["w"], cfg)


__all__ = [
    "AirySolution", "PicardError", "PlateOps", "VkConfig", "bracket", "nonlinear_step",
    "pair_with_tests", "plate_ops", "plate_potential_of_state", "plate_values", "potential",
    "second_derivatives", "solve_airy", "solve_biharmonic", "step_nonlinear", "trilinear", "vk_force",
]
