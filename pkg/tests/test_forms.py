import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from poroplate.elements import eval_basis, map_to_physical, tensor_rule
from poroplate.forms import (MaterialParams, _restrict, _scatter, assemble_gram, assemble_load, build_operators,
                             cell_dofs, coupling_raw, moment_adjoint_kernel, raw_forms, resolvent_load_raw,
                             vector_kernels)
from poroplate.mesh import build_mesh
from poroplate.verify import skew_check

seeds = st.integers(0, 2**32 - 1)


def test_params_positive():
    with pytest.raises(ValueError):
        MaterialParams(c_b=0.0)
    with pytest.raises(ValueError):
        MaterialParams(gamma=-1.0)
    with pytest.raises(ValueError):
        MaterialParams(k_p=float("inf"))


def test_pressure_entry_against_hand_oracle():
    # one unit Biot cell: corner basis (1-x)(1-y)(1-z)
    m = build_mesh(1, 1, 1, 1)
    raw = raw_forms(m)
    c_b, k_b = 2.0, 3.0
    entry = (c_b * raw["pb_mass"] + k_b * raw["pb_lap"])[0, 0]
    # mass: (1/3)^3; stiffness: three terms of 1 * (1/3)^2
    assert entry == pytest.approx(c_b / 27 + k_b / 3, abs=1e-15)


def test_pressure_block_of_operator(params):
    p = params.replace(c_b=2.0, k_b=3.0)
    ops = build_operators(build_mesh(2, 3, 2, 1), p)
    L = ops.layout
    A = ops.matrix("resolvent")
    sl = L.block("pb")
    P = L.P[L.raw_block("pb"), sl]
    expect = P.T @ (p.c_b * ops.raw["pb_mass"] + p.k_b * ops.raw["pb_lap"]) @ P
    assert abs(A[sl, sl] - expect).max() <= 1e-15


def test_coupling_cancels(ops4):
    recs = skew_check(ops4, vectors=100, seed=3)
    assert all(r["pass"] for r in recs), recs


@given(seed=seeds)
def test_quadratic_form_is_the_diagonal_terms(seed):
    ops = build_operators(build_mesh(2, 2, 2, 2), MaterialParams())
    phi = np.random.default_rng(seed).standard_normal(ops.layout.n_free)
    full = phi @ ops.matrix("resolvent") @ phi
    diag = phi @ (ops.M + ops.S + ops.Dm) @ phi
    assert abs(full - diag) <= 1e-12 * diag and diag > 0


def test_coupling_blocks_antisymmetric_entrywise(ops2):
    raw = coupling_raw(ops2.raw, ops2.params)
    assert abs(raw + raw.T).max() == 0.0
    # restriction sums entries in different orders, so only rounding survives
    C0 = _restrict(ops2.layout, raw)
    assert abs(C0 + C0.T).max() <= 1e-15 * abs(C0).max()
    assert abs(ops2.C + ops2.C.T).max() == 0.0


def test_moment_block_matches_independent_adjoint():
    m = build_mesh(3, 1, 1, 3, 0.3)
    raw = raw_forms(m)
    dofs = cell_dofs(m)
    n2 = m.n_plane**2
    ds = m.pore.extents[2]
    adj = None
    for k in range(m.ns_p):
        Ke = moment_adjoint_kernel(m.plate.extents, -m.h_p / 2 + k * ds, ds)
        part = _scatter(Ke, dofs["pp"][k * n2:(k + 1) * n2], dofs["w"], (raw.sizes["pp"], raw.sizes["w"]))
        adj = part if adj is None else adj + part
    K = raw["w__pp_moment"]
    assert abs(K - adj.T).max() <= 1e-13 * abs(K).max()


def _fluid_raw_u(m, fn):
    X = m.fluid.node_coords(2)
    return np.stack(fn(*X.T), axis=1).ravel()


def test_divergence_free_field_is_in_kernel():
    m = build_mesh(3, 1, 2, 1)
    raw = raw_forms(m)
    u = _fluid_raw_u(m, lambda x, y, z: ((z + 1) ** 2 * y, (z + 1) ** 2 * x, 0 * z))
    assert np.abs(raw["pi__u_div"] @ u).max() <= 1e-14


def test_constant_pressure_sees_interface_flux():
    m = build_mesh(2, 1, 3, 1)
    ops = build_operators(m, MaterialParams())
    u = _fluid_raw_u(m, lambda x, y, z: (0 * z, 0 * z, z + 1))
    L = ops.layout
    # (0, 0, z+1) vanishes on the wall, so it is an admissible free velocity
    x = L.zeros()
    x[L.block("u")] = L.restrict({"u": u})[L.block("u")]
    assert np.array_equal(L.expand(x)["u"], u)
    ones = np.ones(L.n_pi)
    assert ones @ (ops.B @ x) == pytest.approx(-1.0, abs=1e-14)
    assert np.all(np.diff(ops.B.tocsr().indptr) > 0)


@given(seed=seeds)
def test_gram_bilinear(seed):
    ops = build_operators(build_mesh(2, 2, 2, 2), MaterialParams())
    phi = np.random.default_rng(seed).standard_normal(ops.layout.n_free)
    q = phi @ ops.G @ phi
    assert (2 * phi) @ ops.G @ (2 * phi) == pytest.approx(4 * q, rel=1e-14)
    assert np.zeros_like(phi) @ ops.G @ np.zeros_like(phi) == 0.0


@pytest.mark.parametrize("n", [1, 2, 4])
def test_gram_positive_definite(n):
    m = build_mesh(n, 2, 2, 2)
    G = assemble_gram(m, None, MaterialParams()).toarray()
    assert np.allclose(G, G.T, atol=1e-14)
    assert np.linalg.eigvalsh(G)[0] > 0


def test_energy_zero_and_constant_in_s(ops2):
    raw = ops2.raw
    zero = np.zeros(raw.sizes["pp"])
    assert zero @ raw["pp_ds"] @ zero == 0.0
    X = ops2.mesh.pore.node_coords(1)
    p = np.sin(2 * np.pi * X[:, 0]) + X[:, 1]  # independent of s
    assert abs(p @ raw["pp_ds"] @ p) <= 1e-14


def test_symmetric_gradient_dissipation_converges():
    errs = []
    exact = 4 * np.pi**2  # 2 mu |D u|^2 with D u = diag(2 pi cos 2 pi x, 0, 0), mu = 1
    for n in (2, 4, 8):
        m = build_mesh(n, 1, 1, 1)
        u = _fluid_raw_u(m, lambda x, y, z: (np.sin(2 * np.pi * x), 0 * x, 0 * x))
        errs.append(abs(u @ raw_forms(m)["u_symgrad2"] @ u - exact) / exact)
    assert errs[0] > errs[1] > errs[2] and errs[2] < 5e-3


@given(hx=st.floats(0.1, 2.0), hy=st.floats(0.1, 2.0), hz=st.floats(0.1, 2.0))
def test_symmetric_gradient_identity(hx, hy, hz):
    vk = vector_kernels("trilinear", np.array([hx, hy, hz]), 2)
    # (D eta, grad k) == (D eta, D k), hence symmetric
    assert np.allclose(2 * vk["sym_vs_grad"], vk["symgrad2"], rtol=0, atol=1e-12 * np.abs(vk["symgrad2"]).max())
    assert np.allclose(vk["sym_vs_grad"], vk["sym_vs_grad"].T, rtol=0, atol=1e-12 * np.abs(vk["symgrad2"]).max())


def test_zero_data_zero_load(ops2):
    L = ops2.layout
    assert not np.any(assemble_load(ops2.mesh, L, ops2.params, ("resolvent", 1.0), {}))
    assert not np.any(assemble_load(ops2.mesh, L, ops2.params, ("velocity", 0.1), {}))
    with pytest.raises(ValueError):
        assemble_load(ops2.mesh, L, ops2.params, ("velocity", 0.0), {})
    with pytest.raises(ValueError):
        resolvent_load_raw(ops2, {"f9": None})


def test_interface_data_load(ops2):
    m = ops2.mesh
    f4 = np.zeros(ops2.raw.sizes["w"])
    f4[0::4] = 1.0  # the constant 1 in Hermite form
    parts = resolvent_load_raw(ops2, {"f4": f4})
    pp = parts["pp"]
    X = m.pore.node_coords(1)
    bottom = np.isclose(X[:, 2], -m.h_p / 2)
    # the moment term pairs with the Laplacian of a constant: zero up to rounding
    assert np.abs(pp[~bottom]).max() <= 1e-15
    assert pp.sum() == pytest.approx(1.0, abs=1e-14)
    # per basis function: int over the mid-surface of the bottom trace
    tab = map_to_physical(m.plate.extents, eval_basis("bilinear", tensor_rule((4, 4))))
    corner = tab.weights @ tab.values[:, 0]
    interior = bottom & (X[:, 0] > 0) & (X[:, 0] < 1) & (X[:, 1] > 0) & (X[:, 1] < 1)
    assert np.allclose(pp[interior], 4 * corner, atol=1e-15)
    # the plate row carries rho_p (f4, xi), the Biot rows nothing
    assert not np.any(parts["eta"]) and not np.any(parts["pb"]) and not np.any(parts["u"])


def test_threaded_assembly_is_identical():
    m = build_mesh(3, 2, 2, 2)
    a = raw_forms(m, 0)
    b = raw_forms(m, 4)
    assert a is not b
    for k in a.mats:
        x, y = sp.csr_matrix(a[k]), sp.csr_matrix(b[k])
        assert np.array_equal(x.indptr, y.indptr) and np.array_equal(x.indices, y.indices)
        assert np.array_equal(x.data, y.data)


def test_operator_modes(ops2):
    with pytest.raises(ValueError):
        ops2.matrix("resolvent", 2.0)
    with pytest.raises(ValueError):
        ops2.matrix("velocity", -1.0)
    with pytest.raises(ValueError):
        ops2.matrix("spectral", 1.0)
    dt = 0.1
    A = ops2.matrix("velocity", dt)
    assert abs(A - (ops2.M / dt + dt * ops2.S + ops2.Dm + ops2.C)).max() == 0.0
