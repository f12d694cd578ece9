import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nullframe.jets import (
    BranchCutError, Jet, JetError, JetZeroDivisionError, OrderMismatchError, SingularMatrixError,
    einsum, inv, jet_space, jprod, jsum,
)


def random_jet(rng, nvars, order, shape=()):
    n = jet_space(nvars, order).size
    c = rng.normal(size=shape + (n,)) + 1j * rng.normal(size=shape + (n,))
    return Jet(c, nvars, order)


def brute_product(a: Jet, b: Jet) -> np.ndarray:
    """Truncated polynomial product by explicit double loop over multi-indices."""
    sp = a.space
    out = np.zeros(sp.size, dtype=complex)
    for i, al in enumerate(sp.indices):
        for j, be in enumerate(sp.indices):
            ga = tuple(x + y for x, y in zip(al, be))
            if sum(ga) <= sp.order:
                out[sp.index[ga]] += a.coeffs[i] * b.coeffs[j]
    return out


@pytest.mark.parametrize("nvars,order", [(1, 4), (2, 3), (3, 2), (4, 4), (4, 0)])
def test_product_matches_brute_force(nvars, order):
    rng = np.random.default_rng(nvars * 10 + order)
    a, b = random_jet(rng, nvars, order), random_jet(rng, nvars, order)
    assert np.allclose((a * b).coeffs, brute_product(a, b), atol=1e-12)


def test_space_layout():
    sp = jet_space(3, 2)
    assert sp.size == 10
    assert sp.indices[0] == (0, 0, 0)
    assert [sum(a) for a in sp.indices] == sorted(sum(a) for a in sp.indices)


def _f(x, y, z):
    return np.exp(np.sin(x * y) + 0.3 * z) / (1.5 + np.cos(z - x)) + np.sqrt(2 + x * x + y)


def test_derivatives_match_finite_differences():
    p = np.array([0.3, -0.4, 0.7])
    X = Jet.variables(p, 2)
    F = (X[0] * X[1]).sin().exp() * (0.3 * X[2]).exp() / (1.5 + (X[2] - X[0]).cos()) \
        + (2 + X[0] * X[0] + X[1]).sqrt()
    assert np.isclose(F.value, _f(*p))
    h = 1e-4
    for v in range(3):
        e = np.eye(3)[v] * h
        fd = (_f(*(p + e)) - _f(*(p - e))) / (2 * h)
        alpha = tuple(np.eye(3, dtype=int)[v])
        assert abs(F.derivative(alpha) - fd) < 1e-7
    for v, w in itertools.combinations_with_replacement(range(3), 2):
        ev, ew = np.eye(3)[v] * h, np.eye(3)[w] * h
        fd = (_f(*(p + ev + ew)) - _f(*(p + ev - ew)) - _f(*(p - ev + ew)) + _f(*(p - ev - ew))) / (4 * h * h)
        alpha = tuple(np.eye(3, dtype=int)[v] + np.eye(3, dtype=int)[w])
        assert abs(F.derivative(alpha) - fd) < 1e-5


def test_elementary_functions_are_consistent():
    X = Jet.variables([0.4, 0.9], 4)
    f = X[0] * X[1] + 1.3
    assert np.allclose(f.log().exp().coeffs, f.coeffs)
    assert np.allclose((f.sqrt() * f.sqrt()).coeffs, f.coeffs)
    assert np.allclose((f.sin() ** 2 + f.cos() ** 2).coeffs, Jet.constant(1, 2, 4).coeffs, atol=1e-13)
    assert np.allclose((f * f.reciprocal()).coeffs, Jet.constant(1, 2, 4).coeffs, atol=1e-13)
    assert np.allclose((f ** -2 * f ** 2).coeffs, Jet.constant(1, 2, 4).coeffs, atol=1e-13)


def test_diff_and_grad():
    X = Jet.variables([1.0, 2.0], 3)
    f = X[0] ** 3 * X[1]
    assert f.diff(0).order == 2
    assert np.isclose(f.diff(0).value, 3 * 2)
    g = f.grad()
    assert g.shape == (2,)
    assert np.allclose(g.value, [6.0, 1.0])


def test_conj_real_imag():
    X = Jet.variables([0.2, 0.5], 2)
    z = X[0] + 1j * X[1]
    assert np.allclose((z * z.conj()).coeffs, (X[0] ** 2 + X[1] ** 2).coeffs)
    assert np.allclose(z.real.coeffs, X[0].coeffs)
    assert np.allclose(z.imag.coeffs, X[1].coeffs)
    assert z.abs2().is_real()


def test_matrix_inverse_and_einsum():
    rng = np.random.default_rng(3)
    m = random_jet(rng, 3, 3, (4, 4))
    m = m + Jet.constant(5 * np.eye(4), 3, 3)
    mi = inv(m)
    eye = einsum("ij,jk->ik", m, mi)
    assert np.allclose(eye.coeffs, Jet.constant(np.eye(4), 3, 3).coeffs, atol=1e-12)
    v = np.arange(4.0)
    assert np.allclose(einsum("ij,j->i", m, v).value, m.value @ v)


def test_errors():
    a = Jet.variables([1.0, 1.0], 2)[0]
    b = Jet.variables([1.0, 1.0], 3)[0]
    with pytest.raises(OrderMismatchError):
        a + b
    with pytest.raises(BranchCutError):
        (a - 2).log()
    with pytest.raises(BranchCutError):
        (a - 1).sqrt()
    with pytest.raises(JetZeroDivisionError):
        a / (a - 1)
    with pytest.raises(SingularMatrixError):
        inv(Jet.constant(np.ones((2, 2)), 2, 1))
    with pytest.raises(JetError):
        Jet.variables([0.0] * 5, 1)
    with pytest.raises(OrderMismatchError):
        a.truncate(0).diff(0)


def test_mixed_order_helpers():
    X2 = Jet.variables([0.5], 2)
    X1 = Jet.variables([0.5], 1)
    s = jsum(X2[0], X1[0], 3.0)
    assert s.order == 1 and np.isclose(s.value, 4.0)
    p = jprod(2.0, X2[0], X1[0])
    assert p.order == 1 and np.isclose(p.derivative((1,)), 2.0)


coef = st.complex_numbers(min_magnitude=0, max_magnitude=3, allow_nan=False, allow_infinity=False)


def jets_from(values, nvars=2, order=3):
    n = jet_space(nvars, order).size
    return Jet(np.array(values[:n]), nvars, order)


jet_strategy = st.lists(coef, min_size=10, max_size=10).map(jets_from)


@settings(max_examples=40, deadline=None)
@given(jet_strategy, jet_strategy, jet_strategy)
def test_ring_axioms(a, b, c):
    assert np.allclose((a * b).coeffs, (b * a).coeffs)
    assert np.allclose(((a * b) * c).coeffs, (a * (b * c)).coeffs, atol=1e-9)
    assert np.allclose((a * (b + c)).coeffs, (a * b + a * c).coeffs, atol=1e-9)
    assert np.allclose((a - a).coeffs, 0)


@settings(max_examples=40, deadline=None)
@given(jet_strategy, jet_strategy)
def test_leibniz_rule(a, b):
    for v in range(2):
        lhs = (a * b).diff(v)
        rhs = a.diff(v) * b.truncate(2) + a.truncate(2) * b.diff(v)
        assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-9)
