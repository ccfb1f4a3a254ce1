import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skgeom import jets
from skgeom._jetcore_py import convolve as py_convolve
from skgeom.errors import EvaluationError, OrderExceededError

finite = st.floats(-2.0, 2.0, allow_nan=False)


def fd_gradient(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    out = np.zeros(len(x))
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = h
        out[i] = (f(x + e) - f(x - e)) / (2 * h)
    return out


def test_index_table_prefix():
    low = jets.index_table(3, 2).indices
    high = jets.index_table(3, 4).indices
    assert high[:len(low)] == low
    assert len(high) == math.comb(3 + 4, 4)


def test_polynomial_coefficients_exact(kernel):
    # f = x^2 y + 3 y^3 at (1, 2)
    f = lambda v: v[0] ** 2 * v[1] + 3 * v[1] ** 3
    jet = jets.jet_eval(f, [1.0, 2.0], 3)
    assert jet.value == pytest.approx(26.0)
    assert np.allclose(jet.gradient(), [4.0, 1.0 + 36.0])
    assert np.allclose(jet.hessian(), [[4.0, 2.0], [2.0, 36.0]])
    assert jet.partial((0, 3)) == pytest.approx(18.0)
    assert jet.partial((2, 1)) == pytest.approx(2.0)


def test_transcendental_against_finite_differences(kernel):
    f = lambda v: jets.log(v[0] * v[1] + jets.exp(v[0])) * jets.sqrt(v[1])
    fnum = lambda v: math.log(v[0] * v[1] + math.exp(v[0])) * math.sqrt(v[1])
    x = np.array([0.3, 1.7])
    jet = jets.jet_eval(f, x, 2)
    assert jet.value == pytest.approx(fnum(x), rel=1e-14)
    assert np.allclose(jet.gradient(), fd_gradient(fnum, x), rtol=1e-8)
    hess_fd = np.array([fd_gradient(lambda y: fd_gradient(fnum, y, 1e-4)[i], x, 1e-4) for i in range(2)])
    assert np.allclose(jet.hessian(), hess_fd, rtol=1e-5, atol=1e-6)


def test_power_series_of_one_variable():
    # d^k/dx^k x^p at x = 2 against the falling factorial
    p = 2.5
    jet = jets.jet_eval(lambda v: v[0] ** p, [2.0], 4)
    for k in range(5):
        falling = math.prod(p - j for j in range(k))
        assert jet.partial((k,)) == pytest.approx(falling * 2.0 ** (p - k), rel=1e-13)


def test_holomorphic_jet_matches_complex_derivative():
    z0 = 0.4 + 0.9j
    jet = jets.jet_eval(lambda v: jets.exp(v[0] * v[0]), [z0], 3)
    assert jet.partial((1,)) == pytest.approx(2 * z0 * np.exp(z0 ** 2))
    assert jet.partial((2,)) == pytest.approx((2 + 4 * z0 ** 2) * np.exp(z0 ** 2))


def test_complex_hessian_of_norm_squared():
    z = np.array([0.3 + 0.1j, -1.0 + 2.0j])
    H = jets.complex_hessian(lambda zs: sum(zi * jets.conj(zi) for zi in zs), z)
    assert np.allclose(H, np.eye(2))


def test_complex_hessian_of_fubini_study_potential():
    z = np.array([0.5 - 0.2j])
    H = jets.complex_hessian(lambda zs: jets.log(1.0 + zs[0] * jets.conj(zs[0])), z)
    assert H[0, 0] == pytest.approx(1.0 / (1.0 + abs(z[0]) ** 2) ** 2)


def test_compose_chain_rule():
    outer = jets.jet_eval(lambda v: jets.exp(v[0]) * v[1], [0.5, 2.0], 3)
    inner = jets.variables(np.array([0.1]), 3)
    u = [0.5 + inner[0] * 2.0 - 0.1 * 2.0, 2.0 + (inner[0] - 0.1) ** 2]
    composed = jets.compose(outer, u)
    direct = jets.jet_eval(lambda v: jets.exp(0.5 + 2.0 * (v[0] - 0.1)) * (2.0 + (v[0] - 0.1) ** 2), [0.1], 3)
    assert np.allclose(composed.coeffs, direct.coeffs)


def test_order_errors():
    jet = jets.jet_eval(lambda v: v[0] ** 2, [1.0], 2)
    with pytest.raises(OrderExceededError):
        jet.coefficient((3,))
    with pytest.raises(OrderExceededError):
        jet.derivative_tensor(3)


def test_evaluation_errors():
    with pytest.raises(EvaluationError):
        jets.jet_eval(lambda v: jets.log(v[0]), [-1.0], 2)
    with pytest.raises(EvaluationError):
        jets.jet_eval(lambda v: 1.0 / v[0], [0.0], 1)


def test_mixed_orders_truncate():
    a = jets.Jet.variable(0, 1.0, 1, 4)
    b = jets.Jet.variable(0, 1.0, 1, 2)
    assert (a * b).order == 2


@settings(max_examples=60, deadline=None)
@given(st.lists(finite, min_size=10, max_size=10), st.lists(finite, min_size=10, max_size=10))
def test_kernels_agree(a, b):
    if not jets.compiled_available():
        return
    from skgeom import _jetcore
    ia, ib, ic = jets.index_table(3, 2).mul
    a = np.array(a)
    b = np.array(b)
    assert np.allclose(_jetcore.convolve(a, b, ia, ib, ic, 10), py_convolve(a, b, ia, ib, ic, 10), atol=1e-14)
    ac, bc = a + 1j * b[::-1], b - 0.5j * a
    assert np.allclose(_jetcore.convolve(ac, bc, ia, ib, ic, 10), py_convolve(ac, bc, ia, ib, ic, 10), atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.tuples(finite, finite), st.tuples(finite, finite), st.tuples(finite, finite))
def test_product_rule_and_ring_laws(p, q, x):
    fa = lambda v: p[0] + p[1] * v[0] + v[0] * v[1]
    fb = lambda v: q[0] + q[1] * v[1] ** 2 + v[0]
    a = jets.jet_eval(fa, x, 3)
    b = jets.jet_eval(fb, x, 3)
    prod = a * b
    assert np.allclose((a * b).coeffs, (b * a).coeffs)
    assert np.allclose(((a + b) * a).coeffs, (a * a + b * a).coeffs, atol=1e-12)
    for i in range(2):
        lhs = jets.deriv(prod, i)
        rhs = jets.deriv(a, i) * jets.truncate(b, 2) + jets.truncate(a, 2) * jets.deriv(b, i)
        assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-1.0, 1.0))
def test_log_exp_inverse(x0, y0):
    jet = jets.jet_eval(lambda v: jets.log(jets.exp(v[0] + v[1] * v[1])), [x0, y0], 4)
    ref = jets.jet_eval(lambda v: v[0] + v[1] * v[1], [x0, y0], 4)
    assert np.allclose(jet.coeffs, ref.coeffs, atol=1e-12)
    r = jets.jet_eval(lambda v: jets.reciprocal(v[0]) * v[0], [x0, y0], 4)
    assert np.allclose(r.coeffs, jets.Jet.constant(1.0, 2, 4).coeffs, atol=1e-12)
