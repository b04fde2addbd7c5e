import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import Polynomial

from symcrit.coef import Coefficient
from symcrit.errors import InputError
from symcrit.expr import ExprError, Expression, parse, to_coefficient

X = np.array([-1.5, -0.2, 0.0, 0.7, 2.0])


@pytest.mark.parametrize("src, fn", [
    ("-tanh(x)", lambda x: -np.tanh(x)),
    ("1/(pi*cosh(x))", lambda x: 1 / (math.pi * np.cosh(x))),
    ("x^2 - 2*x + 1", lambda x: (x - 1) ** 2),
    ("2^3^2", lambda x: 512.0 + 0 * x),
    ("-x^2", lambda x: -x * x),
    ("x**3", lambda x: x ** 3),
    ("exp(-x*x/2)", lambda x: np.exp(-x * x / 2)),
    ("sqrt(abs(x)) + log(1 + x^2)", lambda x: np.sqrt(np.abs(x)) + np.log1p(x * x)),
    ("sin(x)*cos(x) - sinh(x)/cosh(x)", lambda x: np.sin(x) * np.cos(x) - np.tanh(x)),
    ("1.5e-1 * x + .5", lambda x: 0.15 * x + 0.5),
    ("e", lambda x: math.e + 0 * x),
])
def test_evaluation(src, fn):
    np.testing.assert_allclose(parse(src)(X), fn(X), rtol=1e-14, atol=1e-15)


def test_constant_expression_broadcasts():
    out = parse("3")(X)
    assert out.shape == X.shape and np.all(out == 3)


@pytest.mark.parametrize("src, coef", [
    ("x^2 - 2*x + 1", [1, -2, 1]),
    ("(x + 1)^3 / 2", [0.5, 1.5, 1.5, 0.5]),
    ("-x", [0, -1]),
    ("4", [4]),
    ("x^(1+1)", [0, 0, 1]),
])
def test_polynomial_form(src, coef):
    np.testing.assert_allclose(parse(src).as_polynomial().coef, coef)


@pytest.mark.parametrize("src", ["tanh(x)", "1/x", "x^0.5", "x^-1", "x^x", "abs(x)"])
def test_not_polynomial(src):
    assert parse(src).as_polynomial() is None


@pytest.mark.parametrize("src, pos", [
    ("x +", 4), ("foo(x)", 1), ("2*(x", 5), ("x $ 1", 3), ("tanh x", 6), ("", 1), ("x y", 3), ("()", 2),
])
def test_parse_errors_report_position(src, pos):
    with pytest.raises(ExprError) as info:
        parse(src)
    assert info.value.position + 1 == pos
    assert f"position {pos}" in str(info.value)


def test_non_string_rejected():
    with pytest.raises(InputError):
        Expression(3.0)


def test_to_coefficient_kinds():
    c = to_coefficient(parse("2.5"))
    assert c.is_constant and c.poly.coef[0] == 2.5
    p = to_coefficient(parse("1 + x"))
    assert p.poly == Polynomial([1.0, 1.0])
    g = to_coefficient(parse("tanh(x)"))
    assert isinstance(g, Coefficient) and g.poly is None
    np.testing.assert_allclose(g(X), np.tanh(X))


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=6), st.floats(-3, 3))
def test_polynomial_source_round_trip(coef, x):
    src = " + ".join(f"({c})*x^{k}" for k, c in enumerate(coef))
    e = parse(src)
    p = Polynomial(coef)
    assert e.as_polynomial()(x) == pytest.approx(p(x), abs=1e-9)
    assert float(e(np.array([x]))[0]) == pytest.approx(p(x), abs=1e-9)
