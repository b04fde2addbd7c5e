import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import Polynomial
from scipy import integrate

from symcrit.errors import InputError, UnsupportedDimension
from symcrit.measure import (DiracAt, Density, GaussianParam, Samples, char_fn, gaussian_moment_transform,
                             weighted_transform)

from oracles import gaussian_cf


def _scipy_transform(g, mean, var, xi):
    sd = math.sqrt(var)
    pdf = lambda x: math.exp(-0.5 * (x - mean) ** 2 / var) / math.sqrt(2 * math.pi * var)
    kw = dict(epsabs=1e-13, epsrel=1e-12, limit=400)
    re = integrate.quad(lambda x: (np.exp(1j * x * xi) * g(x)).real * pdf(x), mean - 12 * sd, mean + 12 * sd, **kw)[0]
    im = integrate.quad(lambda x: (np.exp(1j * x * xi) * g(x)).imag * pdf(x), mean - 12 * sd, mean + 12 * sd, **kw)[0]
    return complex(re, im)


def test_gaussian_char_fn_closed_form():
    mu = GaussianParam(0.3, 2.0)
    assert char_fn(mu, 1.5).value == pytest.approx(gaussian_cf(0.3, 2.0, 1.5))


@pytest.mark.parametrize("coef", [[1.0], [0.0, 1.0], [0.5, -1.0, 2.0], [0, 0, 0, 0, 1.0], [1, 2, 3, 4, 5, 6]])
def test_moment_transform_against_scipy(coef):
    p = Polynomial(coef)
    got = gaussian_moment_transform(0.4, 0.7, p, 1.3)
    assert got == pytest.approx(_scipy_transform(p, 0.4, 0.7, 1.3), abs=1e-11)


def test_closed_and_quadrature_paths_agree():
    mu = GaussianParam(-0.5, 0.8)
    g = Polynomial([1.0, 2.0j, 0.5])
    for xi in (-4.0, -0.3, 0.9, 5.0):
        closed = weighted_transform(mu, g, xi, method="closed")
        quad = weighted_transform(mu, g, xi, method="quadrature")
        assert closed.error == 0.0
        assert abs(closed.value - quad.value) < 1e-10


def test_callable_weight_uses_quadrature():
    mu = GaussianParam(0.0, 1.0)
    res = weighted_transform(mu, lambda x: np.cos(x[:, 0]), 0.5)
    # E[e^{ix/2} cos x] = (e^{-(3/2)^2/2} + e^{-(1/2)^2/2}) / 2
    assert res.value == pytest.approx(0.5 * (math.exp(-1.125) + math.exp(-0.125)), abs=1e-12)
    with pytest.raises(InputError):
        weighted_transform(mu, lambda x: x[:, 0], 0.5, method="closed")


def test_dirac_transform():
    mu = DiracAt(2.0)
    res = weighted_transform(mu, Polynomial([0.0, 3.0]), 0.25)
    assert res.value == pytest.approx(6.0 * np.exp(0.5j))
    assert res.error == 0.0


def test_samples_transform_and_error():
    pts = np.array([-1.0, 0.0, 2.0, 3.0])
    mu = Samples(pts)
    res = weighted_transform(mu, None, 0.7)
    vals = np.exp(0.7j * pts)
    assert res.value == pytest.approx(vals.mean())
    assert res.error == pytest.approx(math.sqrt((vals.real.var(ddof=1) + vals.imag.var(ddof=1)) / 4))


def test_samples_from_csv(tmp_path):
    f = tmp_path / "s.csv"
    f.write_text("1.0\n2.5\n-3\n")
    np.testing.assert_array_equal(Samples.from_csv(f).points[:, 0], [1.0, 2.5, -3.0])
    g = tmp_path / "t.csv"
    g.write_text("1.0,2.0\n3.0,4.0\n")
    assert Samples.from_csv(g).dim == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0\nfoo\n")
    with pytest.raises(InputError):
        Samples.from_csv(bad)


def test_density_requires_unit_mass():
    with pytest.raises(InputError):
        Density(lambda x: np.ones_like(x), (0.0, 2.0))
    d = Density(lambda x: np.ones_like(x), (0.0, 2.0), normalize=True)
    assert d(np.array([1.0, 3.0])).tolist() == [0.5, 0.0]
    with pytest.raises(InputError):
        Density(lambda x: x, (0.0, math.inf))


def test_density_transform_uniform():
    d = Density(lambda x: np.full_like(x, 0.5), (-1.0, 1.0))
    assert char_fn(d, 2.0).value == pytest.approx(math.sin(2.0) / 2.0, abs=1e-12)


def test_vector_gaussian_closed_form_only():
    mu = GaussianParam([0.0, 1.0], [1.0, 2.0])
    xi = np.array([0.5, -1.0])
    assert char_fn(mu, xi).value == pytest.approx(np.exp(-1j - 0.125 - 1.0))
    with pytest.raises(UnsupportedDimension):
        weighted_transform(mu, lambda x: x[:, 0], xi)


def test_invalid_measures():
    with pytest.raises(InputError):
        GaussianParam(0.0, 0.0)
    with pytest.raises(InputError):
        Samples(np.array([1.0, math.nan]))
    with pytest.raises(InputError):
        char_fn(GaussianParam(0.0, 1.0), [1.0, 2.0])


measures = st.one_of(
    st.builds(GaussianParam, st.floats(-3, 3), st.floats(0.05, 5)),
    st.builds(DiracAt, st.floats(-5, 5)),
    st.builds(Samples, st.lists(st.floats(-5, 5), min_size=2, max_size=20).map(np.array)),
)


@given(measures, st.floats(-10, 10))
def test_char_fn_properties(mu, xi):
    assert char_fn(mu, 0.0).value == 1
    v = char_fn(mu, xi).value
    assert abs(v) <= 1 + 1e-12
    assert char_fn(mu, -xi).value == pytest.approx(np.conj(v), abs=1e-14)
