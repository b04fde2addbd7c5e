import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import Polynomial
from scipy.integrate import trapezoid

from symcrit.criterion import (ERROR_BAND, PASS_WORDING, STANDARD_NOTES, Verdict, albeverio_residual,
                               check_invariance, classify, default_grid, factorizing_check,
                               gou_relation_residual, residual, residual_profile, resolve_threads)
from symcrit.errors import EvaluationError, InputError
from symcrit.levy import LevyTriplet
from symcrit.measure import Density, GaussianParam, Samples
from symcrit.symbol import custom_symbol, levy_symbol, symbol_diffusion, symbol_stable_noise, zero_symbol

SECH = Density(lambda x: 1 / (math.pi * np.cosh(x)), (-40, 40), normalize=True)


def ou_wrong_closed_form(xi, lam=1.0, sigma=1.0, v=1.0):
    # S = phi(xi) xi^2 (sigma^2/2 - lam v)
    return np.exp(-0.5 * v * xi * xi) * xi * xi * (0.5 * sigma ** 2 - lam * v)


def test_verdict_exit_codes():
    assert [v.exit_code for v in Verdict] == [0, 2, 3]
    assert Verdict.CONSISTENT.value == "ConsistentWithInvariance"


def test_classify_rules():
    assert classify([0.0, 1e-7], [0.0, 0.0], 1e-6) is Verdict.CONSISTENT
    assert classify([0.0, 2e-6], [0.0, 0.0], 1e-6) is Verdict.VIOLATED
    # inside the error band
    assert classify([0.0, 2e-6], [0.0, 1e-6], 1e-6) is Verdict.CONSISTENT
    assert classify([math.nan, 1e-9], [math.inf, 0.0], 1e-6) is Verdict.INCONCLUSIVE
    # a violation anywhere dominates failed points
    assert classify([math.nan, 1.0], [math.inf, 0.0], 1e-6) is Verdict.VIOLATED
    assert ERROR_BAND == 3.0


def test_ou_canonical_is_consistent():
    rep = residual_profile(symbol_diffusion(1.0, 1.0), GaussianParam(0.0, 0.5))
    assert rep.max_abs == 0.0
    assert rep.verdict is Verdict.CONSISTENT
    assert rep.grid.shape == (101, 1)
    assert PASS_WORDING in rep.summary() and "invariant for" not in rep.summary()


def test_ou_wrong_variance_closed_form_oracle():
    rep = residual_profile(symbol_diffusion(1.0, 1.0), GaussianParam(0.0, 1.0), method="quadrature")
    xi = rep.grid[:, 0]
    np.testing.assert_allclose(rep.residuals, ou_wrong_closed_form(xi), atol=1e-9)
    assert rep.verdict is Verdict.VIOLATED
    assert abs(rep.argmax[0]) == pytest.approx(1.4)


def test_brownian_motion_has_no_invariant_gaussian():
    s1 = residual(levy_symbol(LevyTriplet.brownian()), GaussianParam(0.0, 1.0), 1.0).value
    assert s1 == pytest.approx(0.5 * math.exp(-0.5), abs=1e-12)
    assert check_invariance(zero_symbol(), GaussianParam(0.0, 1.0)) is Verdict.CONSISTENT


def test_residual_zero_frequency_and_dimension_checks():
    assert residual(symbol_diffusion(1.0, 1.0), GaussianParam(0.0, 3.0), 0.0).value == 0
    with pytest.raises(InputError):
        residual(symbol_diffusion(1.0, 1.0), GaussianParam([0.0, 0.0], [1.0, 1.0]), [1.0, 1.0])
    with pytest.raises(InputError):
        residual_profile(symbol_diffusion(1.0, 1.0), GaussianParam(0.0, 1.0), tol=0.0)
    with pytest.raises(InputError):
        residual_profile(symbol_diffusion(1.0, 1.0), GaussianParam(0.0, 1.0), grid=[])


def test_failed_points_make_report_inconclusive():
    def fn(x, xi):
        if abs(xi[0]) > 4:
            raise EvaluationError("boom")
        return np.zeros(x.shape[0], dtype=complex)

    rep = residual_profile(custom_symbol(fn), GaussianParam(0.0, 1.0), threads=1)
    assert rep.verdict is Verdict.INCONCLUSIVE
    assert any("boom" in n for n in rep.hypothesis_notes)
    assert np.isnan(rep.residuals[0]) and rep.errors[0] == math.inf


def test_notes_always_present():
    rep = residual_profile(zero_symbol(), GaussianParam(0.0, 1.0), notes=["extra"])
    assert rep.hypothesis_notes[:2] == list(STANDARD_NOTES) and "extra" in rep.hypothesis_notes


def test_threading_preserves_grid_order_and_values():
    sym, mu = symbol_diffusion(1.0, Polynomial([1.0, 0.5])), GaussianParam(0.2, 0.8)
    a = residual_profile(sym, mu, threads=1, method="quadrature")
    b = residual_profile(sym, mu, threads=4, method="quadrature")
    np.testing.assert_array_equal(a.residuals, b.residuals)
    np.testing.assert_array_equal(a.grid, b.grid)


def test_resolve_threads_env(monkeypatch):
    monkeypatch.setenv("SYMCRIT_THREADS", "3")
    assert resolve_threads() == 3
    assert resolve_threads(2) == 2
    assert resolve_threads(0) == 1


def test_l2_norm_rectangle_rule():
    rep = residual_profile(symbol_diffusion(1.0, 1.0), GaussianParam(0.0, 1.0), grid=default_grid(2001))
    xi = np.linspace(-5, 5, 2001)
    # int S^2 over R for the closed form, truncated tails are ~e^{-25}
    exact = math.sqrt(trapezoid(ou_wrong_closed_form(xi) ** 2, xi))
    assert rep.l2_norm == pytest.approx(exact, rel=1e-3)


@pytest.mark.parametrize("v", [0.5, 1.0, 0.2])
def test_gou_relation_matches_ou_criterion(v):
    lam, sigma = 1.3, 0.9
    mu = GaussianParam(0.0, v)
    ou = symbol_diffusion(lam, sigma)
    for xi in np.linspace(-5, 5, 41):
        g = gou_relation_residual(LevyTriplet.deterministic(-lam), LevyTriplet.brownian(sigma ** 2), mu, xi)
        assert abs(g.value - residual(ou, mu, xi).value) < 1e-8


def test_gou_relation_with_jump_u_uses_quadrature():
    u = LevyTriplet(-1.0, 0.1, None)
    l = LevyTriplet.stable(1.5)
    mu = GaussianParam(0.0, 1.0)
    r = gou_relation_residual(u, l, mu, 0.8)
    assert np.isfinite(r.value)


def test_albeverio_sech_tanh():
    for xi in np.linspace(-5, 5, 21):
        assert abs(albeverio_residual(1.0, 0.0, 1.0, lambda x: -math.tanh(x), SECH, xi).value) < 1e-10


def test_albeverio_equals_reflected_criterion():
    beta = lambda x: -math.tanh(x)
    sym = symbol_stable_noise(0.7, 0.4, 1.3, beta)
    for xi in (-2.0, 0.5, 3.0):
        a = albeverio_residual(0.7, 0.4, 1.3, beta, SECH, xi).value
        assert a == pytest.approx(residual(sym, SECH, -xi).value, abs=1e-10)


def test_albeverio_rejects_degenerate():
    with pytest.raises(InputError):
        albeverio_residual(0.0, 0.0, 1.0, 0.0, SECH, 1.0)


def test_factorizing_check():
    grid = np.linspace(-5, 5, 101)
    assert factorizing_check(0.0, SECH, grid).verdict == "Compatible"
    res = factorizing_check(1.0, SECH, grid)
    assert res.verdict == "Incompatible" and res.max_value == pytest.approx(1 / math.pi, rel=1e-9)
    assert factorizing_check(lambda x: x, GaussianParam(0.0, 1.0), [0.0]).compatible
    with pytest.raises(InputError):
        factorizing_check(1.0, SECH, [])


@given(st.floats(0.1, 3), st.floats(0.1, 3), st.floats(-5, 5))
def test_ou_cancellation_at_stationary_variance(lam, sigma, xi):
    mu = GaussianParam(0.0, sigma ** 2 / (2 * lam))
    assert abs(residual(symbol_diffusion(lam, sigma), mu, xi).value) < 1e-12
    mu_p = GaussianParam(0.0, sigma ** 2 / lam)
    assert abs(residual(symbol_diffusion(lam, sigma, paper_mode=True), mu_p, xi).value) < 1e-12


def test_samples_residual_has_error_estimate():
    pts = np.random.default_rng(0).normal(0, math.sqrt(0.5), 5000)
    rep = residual_profile(symbol_diffusion(1.0, 1.0), Samples(pts))
    nonzero = rep.grid[:, 0] != 0
    assert np.all(rep.errors[nonzero] > 0) and rep.errors[~nonzero] == 0
    assert rep.verdict is Verdict.CONSISTENT
