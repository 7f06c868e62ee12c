import numpy as np
import pytest
from hypothesis import given, strategies as st

from poroplate.elements import eval_basis, map_to_physical, quadrature_rule, tensor_rule
from poroplate.forms import scalar_kernels

unit = st.floats(0.0, 1.0)
coef = st.floats(-3.0, 3.0)


def test_two_point_rule():
    r = quadrature_rule(1, 2)
    assert np.allclose(np.sort(r.points[:, 0]), 0.5 + np.array([-1, 1]) / (2 * np.sqrt(3)))
    assert np.allclose(r.weights, 0.5)
    assert r.weights @ r.points[:, 0] ** 3 == pytest.approx(0.25, abs=1e-16)


def test_rule_sizes_and_exactness():
    r = quadrature_rule(2, 4)
    assert len(r.weights) == 16 and r.weights.sum() == pytest.approx(1.0, abs=1e-15)
    r = quadrature_rule(3, 3)
    assert abs(r.weights @ np.prod(r.points**2, axis=1) - 1 / 27) <= 1e-15
    assert r.degree == (5, 5, 5)


@pytest.mark.parametrize("bad", [(0, 2), (4, 2), (2, 0)])
def test_rule_rejects(bad):
    with pytest.raises(ValueError):
        quadrature_rule(*bad)


@given(n=st.integers(1, 6), k=st.integers(0, 11))
def test_gauss_exactness_degree(n, k):
    r = quadrature_rule(1, n)
    exact = 1.0 / (k + 1)
    err = abs(r.weights @ r.points[:, 0] ** k - exact)
    if k <= 2 * n - 1:
        assert err <= 1e-14
    else:
        assert r.weights.min() > 0


def test_trilinear_center():
    tab = eval_basis("trilinear", np.array([[0.5, 0.5, 0.5]]))
    assert np.allclose(tab.values, 1 / 8, atol=0, rtol=0)


@given(family=st.sampled_from(["trilinear", "triquadratic", "prism"]), x=unit, y=unit, z=unit)
def test_partition_of_unity(family, x, y, z):
    tab = eval_basis(family, np.array([[x, y, z]]))
    assert abs(tab.values.sum() - 1.0) <= 1e-14
    assert np.all(np.abs(tab.grads.sum(axis=1)) <= 1e-13)


def _hermite_nodal(f, fx, fy, fxy, x0, y0, hx, hy):
    out = []
    for b in (0, 1):
        for a in (0, 1):
            X, Y = x0 + a * hx, y0 + b * hy
            out += [f(X, Y), fx(X, Y), fy(X, Y), fxy(X, Y)]
    return np.array(out)


def test_plate_second_derivatives_of_x2y2():
    ext = np.array([0.5, 0.25])
    x0, y0 = 0.25, 0.5
    c = _hermite_nodal(lambda x, y: x**2 * y**2, lambda x, y: 2 * x * y**2, lambda x, y: 2 * x**2 * y,
                       lambda x, y: 4 * x * y, x0, y0, *ext)
    tab = map_to_physical(ext, eval_basis("hermite_plate", np.array([[0.5, 0.5]])))
    xc, yc = x0 + ext[0] / 2, y0 + ext[1] / 2
    d2 = c @ tab.hess[0]
    assert np.allclose(d2, [2 * yc**2, 2 * xc**2, 4 * xc * yc], rtol=0, atol=1e-13)


@given(cs=st.lists(coef, min_size=16, max_size=16), x=unit, y=unit,
       hx=st.floats(0.1, 2.0), hy=st.floats(0.1, 2.0))
def test_hermite_reproduces_bicubics(cs, x, y, hx, hy):
    C = np.array(cs).reshape(4, 4)  # sum C[i, j] x^i y^j

    def p(dx, dy):
        def f(X, Y):
            tot = 0.0
            for i in range(dx, 4):
                for j in range(dy, 4):
                    fi = np.prod(range(i - dx + 1, i + 1)) if dx else 1
                    fj = np.prod(range(j - dy + 1, j + 1)) if dy else 1
                    tot += C[i, j] * fi * fj * X ** (i - dx) * Y ** (j - dy)
            return tot
        return f

    ext = np.array([hx, hy])
    c = _hermite_nodal(p(0, 0), p(1, 0), p(0, 1), p(1, 1), 0.0, 0.0, hx, hy)
    tab = map_to_physical(ext, eval_basis("hermite_plate", np.array([[x, y]])))
    X, Y = x * hx, y * hy
    scale = 1.0 + np.abs(C).sum() * max(hx, hy, 1.0) ** 6
    assert abs(c @ tab.values[0] - p(0, 0)(X, Y)) <= 1e-13 * scale
    assert np.allclose(c @ tab.grads[0], [p(1, 0)(X, Y), p(0, 1)(X, Y)], atol=1e-12 * scale, rtol=0)
    assert np.allclose(c @ tab.hess[0], [p(2, 0)(X, Y), p(0, 2)(X, Y), p(1, 1)(X, Y)], atol=1e-11 * scale, rtol=0)


@given(c=st.lists(coef, min_size=4, max_size=4), x=unit, y=unit, s1=unit, s2=unit)
def test_prism_constant_in_s(c, x, y, s1, s2):
    # coefficients equal on the bottom and top nodes of the cell
    coeffs = np.array(c * 2)
    t1 = eval_basis("prism", np.array([[x, y, s1]]))
    t2 = eval_basis("prism", np.array([[x, y, s2]]))
    v1, v2 = coeffs @ t1.values[0], coeffs @ t2.values[0]
    # dense oracle: bilinear interpolation of the four corner values
    oracle = c[0] * (1 - x) * (1 - y) + c[1] * x * (1 - y) + c[2] * (1 - x) * y + c[3] * x * y
    assert v1 == pytest.approx(oracle, abs=1e-14) and v2 == pytest.approx(oracle, abs=1e-14)


def test_map_to_physical_scalings():
    tab = eval_basis("trilinear", tensor_rule((2, 2, 2)))
    unit_cell = map_to_physical(np.ones(3), tab)
    assert np.array_equal(unit_cell.grads, tab.grads) and np.array_equal(unit_cell.weights, tab.rule.weights)
    half = map_to_physical(np.full(3, 0.5), tab)
    assert np.allclose(half.grads, 2 * tab.grads) and np.allclose(half.weights, tab.rule.weights / 8)
    for bad in ([1.0, 0.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0]):
        with pytest.raises(ValueError):
            map_to_physical(np.array(bad), tab)


@given(hx=st.floats(0.05, 3.0), hy=st.floats(0.05, 3.0), hz=st.floats(0.05, 3.0))
def test_integral_of_dx_x_is_volume(hx, hy, hz):
    ext = np.array([hx, hy, hz])
    tab = map_to_physical(ext, eval_basis("trilinear", tensor_rule((2, 2, 2))))
    # nodal values of x on the cell (local node a + 2b + 4c has x = a * hx)
    xs = np.array([(i & 1) * hx for i in range(8)])
    dxdx = tab.grads[:, :, 0] @ xs
    assert tab.weights @ dxdx == pytest.approx(hx * hy * hz, rel=1e-13)


@given(hx=st.floats(0.05, 3.0), hy=st.floats(0.05, 3.0), hz=st.floats(0.05, 3.0))
def test_stiffness_rows_sum_to_zero(hx, hy, hz):
    K = scalar_kernels("trilinear", np.array([hx, hy, hz]), 2)["lap"]
    assert np.all(np.abs(K.sum(axis=1)) <= 1e-12 * np.abs(K).max())


def test_unknown_family():
    with pytest.raises(ValueError):
        eval_basis("serendipity", tensor_rule((2, 2, 2)))
    with pytest.raises(ValueError):
        eval_basis("hermite_plate", tensor_rule((2, 2, 2)))
