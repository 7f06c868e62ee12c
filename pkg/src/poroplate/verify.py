"""Verification suites shared by the command line and the test-suite.

Every suite returns a list of check records (``name``, ``value``,
``tolerance``, ``pass``) as produced by :func:`poroplate.output.check_record`.
"""
from __future__ import annotations

import numpy as np

from . import _mms_exact as ex
from .evolution import (check_constraints, compute_energy, energy_audit, resolvent_solve, simulate,
                        x_norm)
from .forms import Operators, _restrict, coupling_raw, stokes_blocks
from .initial import plate_interpolant, random_state
from .mesh import build_mesh
from .moments import adjoint_pairing, moment_pairing, plate_l2_norm, pore_l2_norm
from .output import check_record
from .saddle import estimate_infsup, infsup_reduced, probe_coercivity
from .vonkarman import (VkConfig, bracket, pair_with_tests, plate_ops, plate_values, potential,
                        second_derivatives, solve_airy, solve_biharmonic, vk_force)


def all_passed(records) -> bool:
    return all(r["pass"] for r in records)


# ---------------------------------------------------------------------------
# structure of the linear operator

def adjointness_check(mesh, pairs: int = 100, seed: int = 0, tol: float = 1e-13) -> dict:
    """Max over random (p, xi) of |(K p, Delta xi) - (p, s Delta xi)| / (|p| |Delta xi|)."""
    rng = np.random.default_rng(seed)
    po = plate_ops(mesh)
    npp = int(np.prod(mesh.pore.lattice_shape(1)))
    worst = 0.0
    for _ in range(pairs):
        p = rng.standard_normal(npp)
        xi = np.zeros(po.size)
        xi[po.free] = rng.standard_normal(po.free.size)
        gap = abs(moment_pairing(mesh, p, xi) - adjoint_pairing(mesh, p, xi))
        worst = max(worst, gap / (pore_l2_norm(mesh, p) * plate_l2_norm(mesh, xi)))
    return check_record("moment_adjointness", worst, tol, worst <= tol, pairs=pairs)


def skew_check(ops: Operators, vectors: int = 100, seed: int = 0, tol: float = 1e-12) -> list:
    """Coupling blocks cancel in the quadratic form, and the form stays positive.

    The coupling matrix is taken before the explicit antisymmetrization done
    by the operator builder, so cancellation is a property of the assembled
    blocks rather than of the construction.
    """
    C0 = _restrict(ops.layout, coupling_raw(ops.raw, ops.params)).tocsr()
    A = ops.matrix("resolvent")
    rng = np.random.default_rng(seed)
    worst, min_ratio = 0.0, np.inf
    for _ in range(vectors):
        phi = rng.standard_normal(ops.layout.n_free)
        q = float(phi @ (A @ phi))
        g = float(phi @ (ops.G @ phi))
        worst = max(worst, abs(float(phi @ (C0 @ phi))) / max(q, 1e-300))
        min_ratio = min(min_ratio, q / g)
    return [
        check_record("coupling_cancellation", worst, tol, worst <= tol, vectors=vectors),
        check_record("form_positive", min_ratio, 0.0, min_ratio > 0, note="min phi'A phi / phi'G phi"),
    ]


def coercivity_check(ops: Operators) -> dict:
    lam = probe_coercivity(ops.matrix("resolvent"), ops.G)
    return check_record("coercivity_constant", lam, 0.0, lam > 0, n_plane=ops.mesh.n_plane)


def resolvent_checks(ops: Operators, count: int = 20, seed: int = 0, tol: float = 1e-8) -> list:
    """||y||_X <= ||F||_X + tol for random data, plus the divergence of every solve."""
    worst_gap, worst_ratio, worst_div = -np.inf, 0.0, 0.0
    slaved = True
    for i in range(count):
        F = random_state(ops, seed=seed + i)
        y = resolvent_solve(ops, F)
        ny, nF = x_norm(ops, y), x_norm(ops, F)
        worst_gap = max(worst_gap, ny - nF)
        worst_ratio = max(worst_ratio, ny / nF)
        c = check_constraints(ops, y)
        slaved &= c["slaving_exact"]
        worst_div = max(worst_div, c["div_norm"])
    return [
        check_record("resolvent_contraction", worst_gap, tol, worst_gap <= tol, max_ratio=worst_ratio, solves=count),
        check_record("resolvent_slaving", slaved, True, slaved),
        check_record("resolvent_divergence", worst_div, 1e-10, worst_div <= 1e-10),
    ]


# ---------------------------------------------------------------------------
# inf-sup sweep

def infsup_sweep(n_planes=(2, 4, 8)) -> dict:
    """Taylor-Hood and equal-order Stokes inf-sup constants on refined fluid boxes."""
    rows = []
    for n in n_planes:
        mesh = build_mesh(n, 1, n, 1)
        G, B, M = stokes_blocks(mesh, "triquadratic")
        th = estimate_infsup(G, B, M)
        G1, B1, M1 = stokes_blocks(mesh, "trilinear")
        eo, kernel = infsup_reduced(G1, B1, M1)
        eo_raw = estimate_infsup(G1, B1, M1)
        rows.append({"n_plane": n, "taylor_hood": th, "equal_order": eo_raw, "equal_order_reduced": eo,
                     "equal_order_kernel": kernel})
    return {"rows": rows}


def infsup_checks(sweep: dict, stable_ratio: float = 0.7, degrade: float = 0.3) -> list:
    rows = sweep["rows"]
    first, last = rows[0], rows[-1]
    th_ratio = last["taylor_hood"] / first["taylor_hood"]
    eo_ratio = last["equal_order_reduced"] / first["equal_order_reduced"]
    return [
        check_record("taylor_hood_positive", min(r["taylor_hood"] for r in rows), 0.0,
                     all(r["taylor_hood"] > 0 for r in rows)),
        check_record("taylor_hood_stable", th_ratio, stable_ratio, th_ratio >= stable_ratio),
        check_record("equal_order_degrades", 1.0 - eo_ratio, degrade, 1.0 - eo_ratio > degrade,
                     raw_beta=[r["equal_order"] for r in rows],
                     kernel_dims=[r["equal_order_kernel"] for r in rows],
                     note="reduced constant: smallest eigenvalue above the spurious pressure kernel"),
    ]


def format_infsup(sweep: dict) -> str:
    lines = [f"{'n':>4}{'taylor_hood':>14}{'equal_order':>14}{'eo_reduced':>14}{'eo_kernel':>11}"]
    for r in sweep["rows"]:
        lines.append(f"{r['n_plane']:4d}{r['taylor_hood']:14.6f}{r['equal_order']:14.3e}"
                     f"{r['equal_order_reduced']:14.6f}{r['equal_order_kernel']:11d}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# energy runs

def energy_run_checks(ops: Operators, traj, tol: float = 1e-8) -> list:
    """Identity residual, monotone energy and constraint fidelity of a trajectory."""
    recs = [check_record("run_completed", traj.error or "ok", None, traj.ok)]
    if len(traj.states) < 2:
        return recs
    audit = energy_audit(ops, traj, tol)
    recs.append(check_record("identity_residual", audit.max_residual, tol, audit.passed,
                             first_failure=audit.first_failure))
    if not traj.nonlinear:
        recs.append(check_record("energy_monotone", audit.monotone, True, audit.monotone))
    slaved, div = True, 0.0
    for s in traj.states:
        c = check_constraints(ops, s)
        slaved &= c["slaving_exact"]
        div = max(div, c["div_norm"])
    recs.append(check_record("constraints_slaving", slaved, True, slaved))
    recs.append(check_record("constraints_divergence", div, 1e-10, div <= 1e-10))
    return recs


def nonlinear_energy_checks(ops: Operators, traj, cfg: VkConfig, tol: float = 1e-6, bound: float = 1e-3) -> list:
    """Nonincrease of the total energy E + 2 Pi along a von Karman run."""
    e0 = compute_energy(ops, traj.states[0]).E + 2.0 * potential(ops.mesh, _plate_w(ops, traj.states[0]), cfg)
    totals = np.array([e0] + [r.E_total for r in traj.reports])
    rise = float(np.max(np.diff(totals), initial=0.0))
    overshoot = float(totals.max() - totals[0])
    return [
        check_record("total_energy_nonincreasing", rise, tol, rise <= tol),
        check_record("total_energy_bounded", overshoot, bound, overshoot <= bound),
    ]


def _plate_w(ops, state):
    L = ops.layout
    x = L.zeros()
    x[L.block("w")] = state.w
    return L.expand(x)["w"]


# ---------------------------------------------------------------------------
# von Karman suite

def _random_clamped(mesh, rng) -> np.ndarray:
    po = plate_ops(mesh)
    w = np.zeros(po.size)
    w[po.free] = rng.standard_normal(po.free.size)
    return w


def _poly(mesh, f, fx, fy, fxy):
    return plate_interpolant(mesh, f, fx, fy, fxy)


def bracket_checks(mesh, seed: int = 0) -> list:
    one = lambda x, y: np.ones_like(x)
    zero = lambda x, y: np.zeros_like(x)
    xx = _poly(mesh, lambda x, y: x**2, lambda x, y: 2 * x, zero, zero)
    yy = _poly(mesh, lambda x, y: y**2, zero, lambda x, y: 2 * y, zero)
    xy = _poly(mesh, lambda x, y: x * y, lambda x, y: y, lambda x, y: x, one)
    err_const = float(np.max(np.abs(bracket(mesh, xx, yy) - 4.0)))
    err_xy = float(np.max(np.abs(bracket(mesh, xy, xy) + 2.0)))
    rng = np.random.default_rng(seed)
    po = plate_ops(mesh)
    u, w = rng.standard_normal(po.size), rng.standard_normal(po.size)
    asym = float(np.max(np.abs(bracket(mesh, u, w) - bracket(mesh, w, u))))
    return [
        check_record("bracket_x2_y2", err_const, 1e-12, err_const <= 1e-12),
        check_record("bracket_xy_xy", err_xy, 1e-12, err_xy <= 1e-12),
        check_record("bracket_symmetry", asym, 0.0, asym == 0.0),
    ]


def airy_mms(n_planes=(4, 8, 16)) -> dict:
    """H2-seminorm error of the clamped biharmonic solve against an exact profile."""
    errs = []
    for n in n_planes:
        mesh = build_mesh(n, 1, 1, 1)
        po = plate_ops(mesh)
        X, Y = po.points[..., 0], po.points[..., 1]
        g = ex.airy_load(None, None, X, Y)[0]
        v = solve_biharmonic(mesh, pair_with_tests(mesh, g)).v
        d2 = second_derivatives(mesh, v)
        exact = ex.airy_exact_hessian(None, None, X, Y)
        diff = (d2[..., 0] - exact[0]) ** 2 + (d2[..., 1] - exact[1]) ** 2 + 2 * (d2[..., 2] - exact[2]) ** 2
        errs.append(float(np.sqrt(np.einsum("q,cq->", po.weights, diff))))
    orders = [float(np.log(errs[i] / errs[i + 1]) / np.log(n_planes[i + 1] / n_planes[i]))
              for i in range(len(errs) - 1)]
    return {"n_planes": list(n_planes), "errors": errs, "orders": orders}


def vk_checks(mesh, seed: int = 0) -> list:
    """Potential sign, gradient consistency, cubic scaling and the dual identity."""
    rng = np.random.default_rng(seed)
    cfg = VkConfig()
    po = plate_ops(mesh)
    recs = []
    pis = [potential(mesh, _random_clamped(mesh, rng), cfg) for _ in range(10)]
    recs.append(check_record("potential_nonnegative", min(pis), 0.0, min(pis) >= 0.0))

    w, z = _random_clamped(mesh, rng), _random_clamped(mesh, rng)
    w /= np.sqrt(w @ po.mass @ w)
    z /= np.sqrt(z @ po.mass @ z)
    exact = -float(vk_force(mesh, w, cfg) @ z)
    eps = np.array([0.2, 0.1, 0.05, 0.025])
    errs = [abs((potential(mesh, w + e * z, cfg) - potential(mesh, w - e * z, cfg)) / (2 * e) - exact) for e in eps]
    slope = float(np.polyfit(np.log(eps), np.log(errs), 1)[0])
    recs.append(check_record("frechet_slope", slope, "2 +- 0.1", abs(slope - 2.0) <= 0.1, errors=errs))

    f1 = vk_force(mesh, w, cfg)
    scales = np.array([1e-1, 1e-2, 1e-3])
    rel = max(float(np.linalg.norm(vk_force(mesh, e * w, cfg) - e**3 * f1) / np.linalg.norm(e**3 * f1)) for e in scales)
    recs.append(check_record("cubic_homogeneity", rel, 1e-10, rel <= 1e-10))
    norms = [np.linalg.norm(vk_force(mesh, e * w, cfg)) for e in scales]
    cubic = float(np.polyfit(np.log(scales), np.log(norms), 1)[0])
    recs.append(check_record("cubic_slope", cubic, "3 +- 0.05", abs(cubic - 3.0) <= 0.05))

    # (f(w), w) = ([w, v], w) = ([w, w], v) on clamped fields
    v = solve_airy(mesh, w).v
    lhs = float(f1 @ w)
    rhs = float(np.einsum("q,cq,cq->", po.weights, bracket(mesh, w, w), plate_values(mesh, v)))
    gap = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    recs.append(check_record("bracket_duality", gap, 1e-10, gap <= 1e-10))
    zero = float(np.max(np.abs(vk_force(mesh, np.zeros(po.size), VkConfig(F0=w)))))
    recs.append(check_record("zero_field_zero_force", zero, 0.0, zero == 0.0))
    return recs


def vk_run(ops: Operators, seed: int = 0, amplitude: float = 0.1, dt: float = 1e-3, steps: int = 100,
           cfg: VkConfig | None = None):
    """Zero-forcing von Karman run from small random data; returns (trajectory, records)."""
    cfg = cfg or VkConfig()
    init = random_state(ops, seed=seed, amplitude=amplitude)
    traj = simulate(ops, init, dt, steps, vk=cfg)
    recs = energy_run_checks(ops, traj)
    if traj.ok:
        recs += nonlinear_energy_checks(ops, traj, cfg)
    return traj, recs


__all__ = ["adjointness_check", "airy_mms", "all_passed", "bracket_checks", "coercivity_check",
           "energy_run_checks", "format_infsup", "infsup_checks", "infsup_sweep", "nonlinear_energy_checks",
           "resolvent_checks", "skew_check", "vk_checks", "vk_run"]
