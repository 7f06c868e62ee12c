import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poroplate.evolution import compute_energy, simulate
from poroplate.initial import plate_interpolant, random_state, zero_state
from poroplate.mesh import build_mesh
from poroplate.verify import _plate_w, airy_mms, bracket_checks, vk_checks, vk_run
from poroplate.vonkarman import (PicardError, VkConfig, bracket, pair_with_tests, plate_ops, potential, solve_airy,
                                 step_nonlinear, trilinear, vk_force)

MESH = build_mesh(3, 1, 1, 1)
seeds = st.integers(0, 2**31 - 1)


def _clamped(seed, mesh=MESH):
    po = plate_ops(mesh)
    w = np.zeros(po.size)
    w[po.free] = np.random.default_rng(seed).standard_normal(po.free.size)
    return w


def test_zero_plate():
    w = np.zeros(plate_ops(MESH).size)
    assert np.all(solve_airy(MESH, w).v == 0.0)
    assert np.all(vk_force(MESH, w) == 0.0)
    assert potential(MESH, w) == 0.0


def test_cubic_bracket_is_exact():
    zero = lambda x, y: np.zeros_like(x)
    xc = plate_interpolant(MESH, lambda x, y: x**3, lambda x, y: 3 * x**2, zero, zero)
    yc = plate_interpolant(MESH, lambda x, y: y**3, zero, lambda x, y: 3 * y**2, zero)
    X, Y = plate_ops(MESH).points[..., 0], plate_ops(MESH).points[..., 1]
    # [x^3, y^3] = 6x * 6y
    assert np.max(np.abs(bracket(MESH, xc, yc) - 36 * X * Y)) <= 1e-11


@given(s1=seeds, s2=seeds, s3=seeds, a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_bracket_bilinear_symmetric(s1, s2, s3, a, b):
    po = plate_ops(MESH)
    rng = np.random.default_rng([s1, s2, s3])
    u, v, w = (rng.standard_normal(po.size) for _ in range(3))
    lhs = bracket(MESH, a * u + b * v, w)
    rhs = a * bracket(MESH, u, w) + b * bracket(MESH, v, w)
    assert np.allclose(lhs, rhs, atol=1e-9 * (1 + np.abs(rhs).max()))
    assert np.array_equal(bracket(MESH, u, w), bracket(MESH, w, u))


@settings(max_examples=10)
@given(s1=seeds, s2=seeds, s3=seeds)
def test_trilinear_symmetric_on_clamped(s1, s2, s3):
    a, b, c = _clamped(s1), _clamped(s2), _clamped(s3)
    ref = trilinear(MESH, a, b, c)
    scale = 1 + abs(ref)
    assert trilinear(MESH, a, c, b) == pytest.approx(ref, abs=1e-10 * scale)
    assert trilinear(MESH, c, b, a) == pytest.approx(ref, abs=1e-10 * scale)


def test_bracket_suite():
    records = bracket_checks(MESH, seed=0)
    assert all(r["pass"] for r in records), records


def test_airy_converges_second_order():
    out = airy_mms((4, 8, 16))
    assert np.all(np.diff(out["errors"]) < 0)
    assert min(out["orders"]) >= 1.8


def test_airy_residual_small():
    sol = solve_airy(MESH, _clamped(1))
    assert sol.residual <= 1e-10
    po = plate_ops(MESH)
    clamped = np.setdiff1d(np.arange(po.size), po.free)
    assert np.all(sol.v[clamped] == 0.0)


def test_potential_gradient_suite():
    records = vk_checks(MESH, seed=0)
    assert all(r["pass"] for r in records), records


@settings(max_examples=10)
@given(seed=seeds, scale=st.floats(0.1, 5.0))
def test_potential_nonnegative_and_quartic(seed, scale):
    w = _clamped(seed)
    p1 = potential(MESH, w)
    assert p1 >= 0
    assert potential(MESH, scale * w) == pytest.approx(scale**4 * p1, rel=1e-9)


def test_prestress_shifts_force():
    w = _clamped(2)
    F0 = _clamped(3)
    base = vk_force(MESH, w)
    shifted = vk_force(MESH, w, VkConfig(F0=F0))
    po = plate_ops(MESH)
    assert np.allclose(shifted - base, np.where(np.isin(np.arange(po.size), po.free),
                                                pair_with_tests(MESH, bracket(MESH, w, F0)), 0.0), atol=1e-10)


def test_config_validation():
    with pytest.raises(ValueError):
        VkConfig(picard_tol=0.0)
    with pytest.raises(ValueError):
        VkConfig(picard_max=0)


def test_zero_state_one_picard_iteration(ops2):
    s1, rep = step_nonlinear(ops2, zero_state(ops2), 0.01)
    assert rep.picard_iterations == 1 and rep.Pi == 0.0 and rep.E == 0.0
    assert np.all(s1.w == 0.0)


def test_picard_failure_keeps_history(ops2):
    cfg = VkConfig(picard_tol=1e-300, picard_max=2)
    with pytest.raises(PicardError) as info:
        step_nonlinear(ops2, random_state(ops2, seed=0, amplitude=1.0), 0.01, cfg)
    assert len(info.value.history) == 2


def test_failed_run_keeps_partial_trajectory(ops2):
    cfg = VkConfig(picard_tol=1e-300, picard_max=2)
    traj = simulate(ops2, random_state(ops2, seed=0), 0.01, 3, vk=cfg)
    assert not traj.ok and "PicardError" in traj.error and len(traj.states) == 1


def test_nonlinear_run_energy(ops4):
    traj, records = vk_run(ops4, seed=0, steps=20)
    assert traj.ok and all(r["pass"] for r in records), records
    assert all(r.Pi is not None and r.Pi >= 0 for r in traj.reports)
    e0 = compute_energy(ops4, traj.states[0]).E
    assert traj.reports[-1].E_total <= e0 + 2 * potential(ops4.mesh, _plate_w(ops4, traj.states[0]))

