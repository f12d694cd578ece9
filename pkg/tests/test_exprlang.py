import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nullframe.exprlang import (
    BinOp, Call, Const, Coord, ExprError, ExprField, FUNCTIONS, Neg, Num, Pow, as_field, coordinates,
    evaluate, parse, unparse,
)
from nullframe.jets import Jet

CHART = ("u", "z_re", "z_im")


def test_precedence():
    assert parse("-x^2") == Pow(Neg(Coord("x")), 2)
    assert parse("a + b*c") == BinOp("+", Coord("a"), BinOp("*", Coord("b"), Coord("c")))
    assert parse("a - b - c") == BinOp("-", BinOp("-", Coord("a"), Coord("b")), Coord("c"))
    assert parse("x^-3") == Pow(Coord("x"), -3)
    assert parse("2*pi*i") == BinOp("*", BinOp("*", Num(2.0), Const("pi")), Const("i"))
    assert parse("exp(u)") == Call("exp", Coord("u"))


def test_numbers():
    assert parse("1.5e-3") == Num(1.5e-3)
    assert parse(".5") == Num(0.5)


def test_evaluate_numbers_and_jets():
    e = parse("exp(i*z_re) + z_im^2/u - conj(i)", CHART)
    env = {"u": 2.0, "z_re": 0.3, "z_im": -1.0}
    want = np.exp(0.3j) + 1 / 2.0 + 1j
    assert np.isclose(evaluate(e, env), want)
    X = Jet.variables([2.0, 0.3, -1.0], 2)
    J = evaluate(e, dict(zip(CHART, X)))
    assert np.isclose(J.value, want)
    assert np.isclose(J.derivative((0, 1, 0)), 1j * np.exp(0.3j))


def test_real_parts_and_abs2():
    f = ExprField("re(z_re + i*z_im) + im(z_re + i*z_im) + abs2(z_re + i*z_im)", CHART)
    X = Jet.variables([0.0, 0.4, 0.7], 1)
    v = f(X)
    assert np.isclose(v.value, 0.4 + 0.7 + 0.65)
    assert coordinates(f.expr) == {"z_re", "z_im"}


@pytest.mark.parametrize("src,offset", [
    ("u + $", 4),
    ("u + ", 4),
    ("(u + 1", 6),
    ("foo(u)", 0),
    ("u + q", 4),
    ("u^1.5", 2),
    ("u^z_re", 2),
    ("exp", 0),
    ("u u", 2),
    ("é + u", 0),
    ("u +\u00a0q", 5),  # offsets count UTF-8 bytes
    ("(u + 1) * q", 10),
])
def test_error_offsets(src, offset):
    with pytest.raises(ExprError) as info:
        parse(src, CHART)
    assert info.value.offset == offset


def test_as_field():
    X = Jet.variables([1.0, 2.0, 3.0], 1)
    assert as_field(2.5, CHART)(X) == 2.5
    assert np.isclose(as_field("u*z_re", CHART)(X).value, 2.0)
    assert as_field(lambda X: X[2], CHART)(X) is X[2]
    assert np.isclose(as_field(parse("z_im"), CHART)(X).value, 3.0)
    with pytest.raises(ExprError):
        as_field(object(), CHART)


leaf = st.one_of(
    st.floats(min_value=0, max_value=1e3, allow_nan=False).map(Num),
    st.sampled_from(["i", "pi"]).map(Const),
    st.sampled_from(CHART).map(Coord),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(children, st.integers(-4, 4)).map(lambda t: Pow(*t)),
        st.tuples(st.sampled_from(FUNCTIONS), children).map(lambda t: Call(*t)),
    )


expr_strategy = st.recursive(leaf, _extend, max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(expr_strategy)
def test_unparse_round_trip(e):
    assert parse(unparse(e), CHART) == e
