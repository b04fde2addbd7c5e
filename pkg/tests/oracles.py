"""Independent reference values used by the tests.

Nothing here imports symcrit: each oracle recomputes its quantity from the
defining integral or a textbook closed form.
"""
import math
import warnings

import numpy as np
from scipy import integrate, special


def stable_constant_quadrature(alpha: float, d: int = 1) -> float:
    """``int (cos(u'y) - 1) |y|^{-(d+alpha)} dy`` by radial quadrature (d = 1 or 3).

    The angular integral is ``2 (cos r - 1)`` for d = 1 and
    ``4 pi (sin r / r - 1)`` for d = 3; the oscillatory tail on ``[1, inf)``
    goes through QUADPACK's Fourier-weight routine.
    """
    p = 1.0 + alpha
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return _stable_radial(alpha, d, p)


def _sinc_minus_one(r: float) -> float:
    if r < 1e-2:
        r2 = r * r
        return -r2 / 6 + r2 * r2 / 120 - r2 ** 3 / 5040
    return math.sin(r) / r - 1.0


def _stable_radial(alpha, d, p):
    if d == 1:
        head = integrate.quad(lambda r: -2.0 * math.sin(0.5 * r) ** 2 * r ** -p, 0.0, 1.0,
                              epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        tail = integrate.quad(lambda r: r ** -p, 1.0, math.inf, weight="cos", wvar=1.0,
                              epsabs=1e-14, limlst=200)[0] - 1.0 / alpha
        return 2.0 * (head + tail)
    if d == 3:
        # r^{d-1} r^{-(d+alpha)} = r^{-p}
        head = integrate.quad(lambda r: _sinc_minus_one(r) * r ** -p, 0.0, 1.0,
                              epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        tail = integrate.quad(lambda r: r ** -(p + 1.0), 1.0, math.inf, weight="sin", wvar=1.0,
                              epsabs=1e-14, limlst=200)[0] - 1.0 / alpha
        return 4.0 * math.pi * (head + tail)
    raise ValueError("oracle covers d = 1 and d = 3")


def ou_lambda_exact(lam: float, sigma: float, x: float, xi: float, t: float) -> complex:
    """``-(E^x e^{i(X_t - x)xi} - 1) / t`` for OU from its Gaussian transition law."""
    m = x * math.exp(-lam * t)
    v = sigma ** 2 * (1.0 - math.exp(-2.0 * lam * t)) / (2.0 * lam)
    cf = np.exp(1j * (m - x) * xi - 0.5 * v * xi * xi)
    return complex(-(cf - 1.0) / t)


def cosh_speed_total(theta: float = 1.0, c: float = 1.0) -> float:
    """``M = int cosh(x) exp(-2 theta (cosh x - 1) / c^2) dx / c^2``.

    With ``k = 2 theta / c^2``: ``int cosh(x) e^{-k cosh x} dx = 2 K_1(k)``.
    """
    k = 2.0 * theta / c ** 2
    return math.exp(k) * 2.0 * special.k1(k) / c ** 2


def cosh_scale_trapezoid(x: float, theta: float = 1.0, c: float = 1.0, n: int = 200001) -> float:
    """``s(x) = exp(-2 int_0^x b/sigma^2)`` with the drift integral by the trapezoid rule."""
    u = np.linspace(0.0, x, n)
    b = -(theta + c * c / (2 * np.cosh(u))) * np.sinh(u) / np.cosh(u) ** 2
    ratio = b / (c / np.cosh(u)) ** 2
    integral = float(np.sum((ratio[1:] + ratio[:-1]) * np.diff(u)) / 2)
    return math.exp(-2.0 * integral)


def gaussian_cf(mean: float, variance: float, xi):
    xi = np.asarray(xi, dtype=float)
    return np.exp(1j * mean * xi - 0.5 * variance * xi * xi)
