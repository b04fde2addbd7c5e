import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import Polynomial

from symcrit import quadrature
from symcrit.errors import EvaluationError


def test_rules_integrate_constants_exactly():
    assert quadrature.KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert quadrature.GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    # Gauss weights sit on the 7 interior Kronrod-shared nodes only
    assert np.count_nonzero(quadrature.GAUSS_WEIGHTS) == 7


@pytest.mark.parametrize("k", range(0, 24))
def test_kronrod_degree_of_exactness(k):
    x, w = quadrature.NODES, quadrature.KRONROD_WEIGHTS
    exact = 0.0 if k % 2 else 2.0 / (k + 1)
    assert w @ x ** k == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("k", range(0, 14))
def test_gauss_degree_of_exactness(k):
    x, w = quadrature.NODES, quadrature.GAUSS_WEIGHTS
    exact = 0.0 if k % 2 else 2.0 / (k + 1)
    assert w @ x ** k == pytest.approx(exact, abs=1e-14)


def test_gaussian_fourier_integral():
    xi = 3.0
    f = lambda x: np.exp(1j * x * xi - 0.5 * x * x) / math.sqrt(2 * math.pi)
    res = quadrature.integrate(f, -12, 12, max_width=math.pi / (4 * xi), rtol=1e-12, atol=0)
    assert abs(res.value - math.exp(-4.5)) < 1e-13
    assert res.error < 1e-10


def test_reversed_limits_and_empty_interval():
    f = lambda x: x ** 2
    assert quadrature.integrate(f, 1, 0).value == pytest.approx(-1 / 3)
    assert quadrature.integrate(f, 2, 2).value == 0


def test_adaptivity_on_a_kink():
    res = quadrature.integrate(lambda x: np.abs(x - 0.3), -1, 1, rtol=1e-12, atol=0)
    assert res.value.real == pytest.approx(0.5 * (1.3 ** 2 + 0.7 ** 2), rel=1e-11)
    assert res.panels > 4


def test_nonfinite_integrand_raises():
    with pytest.raises(EvaluationError):
        quadrature.integrate(lambda x: 1 / x, -1, 1)


def test_panel_budget_raises():
    with pytest.raises(EvaluationError):
        quadrature.integrate(lambda x: np.sin(1e6 * x), 0, 1, rtol=1e-14, atol=0, max_panels=50)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=12), st.floats(-3, 0), st.floats(0.1, 3))
def test_polynomials_match_antiderivative(coef, a, width):
    p = Polynomial(coef)
    b = a + width
    P = p.integ()
    res = quadrature.integrate(p, a, b, rtol=1e-13, atol=1e-13)
    assert abs(res.value - (P(b) - P(a))) <= 1e-10 * (1 + abs(P(b) - P(a)))
