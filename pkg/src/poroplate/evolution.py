"""Resolvent solve, velocity-form implicit Euler, energy bookkeeping.

A state stores free coefficient blocks.  Displacements (eta, w) and
velocities (zeta, v) share the eta and w blocks of the layout; expanding a
block vector through the layout reproduces every slaved or periodic DOF,
so trace constraints hold by construction.

With ``x = [zeta, pb, v, pp, u]`` and ``d = [eta, 0, w, 0, 0]`` one step solves

    (M/dt + dt S + Dm + C) x' + B^T pi' = M x/dt - S d + f,   B x' = 0
    d' = d + dt x'   (eta and w blocks only)

and testing with x' gives the exact identity

    E' - E + J' + 2 dt D' = 2 dt f.x'

with E = x.M.x + d.S.d, J the same form applied to the increments and
D = x'.Dm.x'.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dofs import DofLayout
from .forms import (
    Operators,
    SaddleSystem,
    _to_free,
    forcing_load_raw,
    resolvent_load_raw,
)
from .saddle import SaddleFactor, SaddleSolveError

STATE_FIELDS = ("eta", "zeta", "pb", "w", "v", "pp", "u", "pi")
# state field -> layout block
FIELD_BLOCK = {"eta": "eta", "zeta": "eta", "pb": "pb", "w": "w", "v": "w", "pp": "pp", "u": "u"}
ENERGY_COLUMNS = ("E_eta", "E_zeta", "E_pb", "E_w", "E_v", "E_pp", "E_u")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable snapshot [eta, zeta, pb, w, v, pp, u, pi] at time t."""

    eta: np.ndarray
    zeta: np.ndarray
    pb: np.ndarray
    w: np.ndarray
    v: np.ndarray
    pp: np.ndarray
    u: np.ndarray
    pi: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for f in STATE_FIELDS:
            a = np.array(getattr(self, f), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, f, a)

    @classmethod
    def zeros(cls, layout: DofLayout, t: float = 0.0) -> "StateVector":
        kw = {f: np.zeros(layout.block_sizes[FIELD_BLOCK[f]]) for f in FIELD_BLOCK}
        return cls(pi=np.zeros(layout.n_pi), t=t, **kw)

    def velocity(self, layout: DofLayout) -> np.ndarray:
        return layout.block_vector({"eta": self.zeta, "pb": self.pb, "w": self.v, "pp": self.pp, "u": self.u})

    def displacement(self, layout: DofLayout) -> np.ndarray:
        return layout.block_vector({"eta": self.eta, "w": self.w})

    def replace(self, **kw) -> "StateVector":
        return dataclasses.replace(self, **kw)

    def scaled(self, a: float) -> "StateVector":
        return StateVector(**{f: a * getattr(self, f) for f in STATE_FIELDS}, t=self.t)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return StateVector(**{f: getattr(self, f) - getattr(other, f) for f in STATE_FIELDS}, t=self.t)

    def raw(self, layout: DofLayout) -> dict:
        """Raw nodal arrays of every field, constraints applied."""
        vel = layout.expand(self.velocity(layout))
        disp = layout.expand(self.displacement(layout))
        return {
            "eta": disp["eta"],
            "zeta": vel["eta"],
            "pb": vel["pb"],
            "w": disp["w"],
            "v": vel["w"],
            "pp": vel["pp"],
            "u": vel["u"],
            "pi": layout.expand_pi(self.pi),
        }


@dataclass(frozen=True)
class EnergyReport:
    t: float
    E: float
    blocks: dict
    D_diss: float = 0.0
    J: float = 0.0
    identity_residual: float = 0.0
    work: float = 0.0
    Pi: float | None = None
    picard_iterations: int = 0

    @property
    def relative_residual(self) -> float:
        return self.identity_residual

    @property
    def E_total(self) -> float:
        """Nonlinear Lyapunov functional E + 2 Pi (E counts squares without 1/2)."""
        return self.E + 2.0 * (self.Pi or 0.0)

    def row(self) -> list:
        return [self.t, self.E] + [self.blocks[k] for k in ENERGY_COLUMNS] + [self.D_diss, self.J, self.identity_residual]


def energy_blocks(ops: Operators, state: StateVector) -> dict:
    raw = state.raw(ops.layout)
    src = {"disp": {"eta": raw["eta"], "w": raw["w"]},
           "vel": {"eta": raw["zeta"], "pb": raw["pb"], "w": raw["v"], "pp": raw["pp"], "u": raw["u"]}}
    out = {}
    for name, (blk, mat, kind) in ops.energy_blocks.items():
        y = src[kind][blk]
        out[name] = float(y @ (mat @ y))
    return out


def compute_energy(ops: Operators, state: StateVector) -> EnergyReport:
    """Energy of a state, total and per block."""
    b = energy_blocks(ops, state)
    return EnergyReport(t=state.t, E=float(sum(b[k] for k in ENERGY_COLUMNS)), blocks=b)


def dissipation(ops: Operators, state: StateVector) -> float:
    raw = state.raw(ops.layout)
    total = 0.0
    for _, (blk, mat) in ops.dissipation_blocks.items():
        y = raw[blk]
        total += float(y @ (mat @ y))
    return total


def x_norm(ops: Operators, state: StateVector) -> float:
    return float(np.sqrt(max(compute_energy(ops, state).E, 0.0)))


# ---------------------------------------------------------------------------
# resolvent

def _raw_from_state(ops: Operators, F: StateVector) -> dict:
    r = F.raw(ops.layout)
    return {"f1": r["eta"], "f2": r["zeta"], "f3": r["pb"], "f4": r["w"], "f5": r["v"], "f6": r["pp"], "f7": r["u"]}


def resolvent_solve(ops: Operators, F, lam: float = 1.0) -> StateVector:
    """Solve (lam I - A) y = F at lam = 1 through the mixed system.

    ``F`` is a StateVector, or a dict with keys f1..f7 holding raw nodal arrays
    or callables (f1 and f4 must be raw arrays consistent with the constraints).
    """
    if lam != 1.0:
        raise ValueError("only the unit shift has an explicit mixed form")
    L = ops.layout
    if isinstance(F, StateVector):
        data = _raw_from_state(ops, F)
        f1, f4 = F.eta, F.w
    else:
        data = dict(F)
        f1 = L.restrict({"eta": data["f1"]})[L.block("eta")] if data.get("f1") is not None else np.zeros(L.block_sizes["eta"])
        f4 = L.restrict({"w": data["f4"]})[L.block("w")] if data.get("f4") is not None else np.zeros(L.block_sizes["w"])
    load = _to_free(ops, resolvent_load_raw(ops, data))
    sol = _factor(ops, "resolvent", 1.0).solve(load)
    _check_solution(sol)
    phi = sol.phi
    eta, w = phi[L.block("eta")], phi[L.block("w")]
    return StateVector(eta=eta, zeta=eta - f1, pb=phi[L.block("pb")], w=w, v=w - f4,
                       pp=phi[L.block("pp")], u=phi[L.block("u")], pi=sol.pi)


def _check_solution(sol, tol_rel=1e-10, tol_abs=1e-10):
    if sol.momentum_residual > tol_rel or sol.constraint_residual > tol_abs:
        raise SaddleSolveError(
            f"solve residuals {sol.momentum_residual:.3e} / {sol.constraint_residual:.3e} exceed tolerance",
            block="KKT",
        )


_FACTORS: dict = {}


def _factor(ops: Operators, mode: str, value: float) -> SaddleFactor:
    key = (id(ops), mode, float(value))
    fac = _FACTORS.get(key)
    if fac is None or fac.ops_ref is not ops:
        fac = SaddleFactor(ops.matrix(mode, value), ops.B)
        fac.ops_ref = ops
        if len(_FACTORS) > 16:
            _FACTORS.clear()
        _FACTORS[key] = fac
    return fac


def saddle_system(ops: Operators, mode="resolvent", value=1.0, f=None) -> SaddleSystem:
    return SaddleSystem(A=ops.matrix(mode, value), B=ops.B, f=f, G=ops.G, mode=(mode, value))


# ---------------------------------------------------------------------------
# time stepping

def _forcing_at(forcing, t):
    if forcing is None:
        return None
    return forcing(t) if callable(forcing) else forcing


@dataclass(frozen=True, eq=False)
class StepResult:
    state: StateVector
    report: EnergyReport
    load: np.ndarray  # total free load used (forcing + nonlinear), for auditing


def _advance(ops: Operators, state: StateVector, dt: float, load: np.ndarray) -> StateVector:
    L = ops.layout
    x0 = state.velocity(L)
    d0 = state.displacement(L)
    rhs = ops.M @ x0 / dt - ops.S @ d0 + load
    sol = _factor(ops, "velocity", dt).solve(rhs)
    _check_solution(sol)
    x = sol.phi
    zeta, v = x[L.block("eta")], x[L.block("w")]
    return StateVector(eta=state.eta + dt * zeta, zeta=zeta, pb=x[L.block("pb")], w=state.w + dt * v, v=v,
                       pp=x[L.block("pp")], u=x[L.block("u")], pi=sol.pi, t=state.t + dt)


def identity_terms(ops: Operators, prev: StateVector, new: StateVector, dt: float, load: np.ndarray) -> EnergyReport:
    """Energy report of ``new`` with the discrete identity evaluated against ``prev``."""
    L = ops.layout
    e0 = compute_energy(ops, prev).E
    rep = compute_energy(ops, new)
    J = compute_energy(ops, new - prev).E
    D = dissipation(ops, new)
    work = float(load @ new.velocity(L))
    res = rep.E - e0 + J + 2.0 * dt * D - 2.0 * dt * work
    rel = res / max(e0, 1.0)
    return dataclasses.replace(rep, D_diss=D, J=J, identity_residual=rel, work=work)


def forcing_load(ops: Operators, forcing: dict | None) -> np.ndarray:
    if not forcing:
        return ops.layout.zeros()
    return _to_free(ops, forcing_load_raw(ops, forcing))


def step_implicit_euler(ops: Operators, state: StateVector, dt: float, forcing=None) -> tuple[StateVector, EnergyReport]:
    """One velocity-form implicit Euler step; ``forcing`` is a dict of source slots or a callable of t."""
    res = _step(ops, state, dt, forcing)
    return res.state, res.report


def _step(ops, state, dt, forcing) -> StepResult:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    load = forcing_load(ops, _forcing_at(forcing, state.t + dt))
    new = _advance(ops, state, dt, load)
    return StepResult(new, identity_terms(ops, state, new, dt, load), load)


@dataclass
class Trajectory:
    """States t_0..t_N, reports for steps 1..N and the loads used per step."""

    dt: float
    states: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    loads: list = field(default_factory=list)
    error: str | None = None
    nonlinear: bool = False

    @property
    def ok(self) -> bool:
        return self.error is None


def simulate(ops: Operators, initial: StateVector, dt: float, steps: int, forcing=None,
             vk=None, on_step: Callable | None = None) -> Trajectory:
    """Run ``steps`` implicit Euler steps.  ``vk`` (a VkConfig) switches on the plate nonlinearity.

    A failing step stops the run; the partial trajectory carries the error.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    traj = Trajectory(dt=dt, states=[initial], nonlinear=vk is not None)
    state = initial
    for n in range(steps):
        try:
            if vk is None:
                res = _step(ops, state, dt, forcing)
            else:
                from .vonkarman import nonlinear_step

                res = nonlinear_step(ops, state, dt, vk, forcing)
        except Exception as exc:  # keep the partial trajectory
            traj.error = f"step {n + 1}: {type(exc).__name__}: {exc}"
            break
        state = res.state
        traj.states.append(state)
        traj.reports.append(res.report)
        traj.loads.append(res.load)
        if on_step is not None:
            on_step(n + 1, state, res.report)
    return traj


@dataclass(frozen=True)
class AuditSummary:
    residuals: np.ndarray
    max_residual: float
    mean_residual: float
    monotone: bool
    first_failure: int | None  # 1-based step index, None if all pass
    failed_steps: tuple
    tol: float

    @property
    def passed(self) -> bool:
        return self.first_failure is None

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def energy_audit(ops: Operators, traj: Trajectory, tol: float = 1e-8) -> AuditSummary:
    """Recompute the per-step identity from the stored states and loads."""
    if len(traj.states) < 2:
        raise ValueError("audit needs at least two states")
    res = []
    energies = [compute_energy(ops, traj.states[0]).E]
    for n in range(1, len(traj.states)):
        rep = identity_terms(ops, traj.states[n - 1], traj.states[n], traj.dt, traj.loads[n - 1])
        res.append(rep.identity_residual)
        energies.append(rep.E)
    res = np.abs(np.array(res))
    failed = tuple(int(i) + 1 for i in np.flatnonzero(res > tol))
    E = np.array(energies)
    forced = any(np.any(l != 0) for l in traj.loads)
    monotone = bool(np.all(np.diff(E) <= 0)) if not forced else True
    return AuditSummary(
        residuals=res,
        max_residual=float(res.max()),
        mean_residual=float(res.mean()),
        monotone=monotone,
        first_failure=failed[0] if failed else None,
        failed_steps=failed,
        tol=tol,
    )


def check_constraints(ops: Operators, state: StateVector) -> dict:
    """Bitwise trace slaving checks and the discrete divergence norm."""
    L = ops.layout
    raw = state.raw(L)
    ok = True
    for disp, plate in (("eta", "w"), ("zeta", "v")):
        m, _, tgt = L.slave_map["eta"]
        ok &= bool(np.array_equal(raw[disp][m], raw[plate][tgt]))
        inplane = np.flatnonzero(L.essential_zeros["eta"])
        ok &= bool(np.all(raw[disp][inplane] == 0.0))
    m, _, tgt = L.slave_map["pb"]
    ok &= bool(np.array_equal(raw["pb"][m], raw["pp"][tgt]))
    return {"slaving_exact": ok, "div_norm": float(np.linalg.norm(ops.B @ state.velocity(L)))}
