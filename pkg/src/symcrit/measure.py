"""Candidate probability measures and their weighted Fourier transforms.

``weighted_transform(mu, g, xi)`` computes ``int e^{i x'xi} g(x) mu(dx)``.
The weight ``g`` is either ``None`` (the characteristic function), a
:class:`numpy.polynomial.Polynomial` (d = 1; exact for Gaussian measures) or
a callable receiving an ``(m, d)`` array of states.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
from numpy.polynomial import Polynomial

from . import quadrature
from .coef import Coefficient, as_coefficient
from .errors import InputError, UnsupportedDimension

#: Half-width of the truncated Gaussian support, in standard deviations
#: (two-sided tail mass ~2e-19).
GAUSS_TRUNCATION = 9.0
RTOL = 1e-9
ATOL = 1e-12


class TransformValue(NamedTuple):
    value: complex
    error: float


@dataclass(frozen=True)
class GaussianParam:
    """Normal law with mean ``mean`` and diagonal variances ``variance``."""

    mean: np.ndarray = 0.0
    variance: np.ndarray = 1.0

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        var = np.atleast_1d(np.asarray(self.variance, dtype=float))
        if var.size == 1 and mean.size > 1:
            var = np.full(mean.size, var[0])
        if mean.size == 1 and var.size > 1:
            mean = np.full(var.size, mean[0])
        if mean.shape != var.shape:
            raise InputError("gaussian: mean and variance dimensions differ")
        if np.any(var <= 0) or not np.all(np.isfinite(var)) or not np.all(np.isfinite(mean)):
            raise InputError("gaussian: variance must be finite and > 0")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", var)

    @property
    def dim(self) -> int:
        return self.mean.size

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        m, v = self.mean[0], self.variance[0]
        return np.exp(-0.5 * (x - m) ** 2 / v) / math.sqrt(2 * math.pi * v)


@dataclass(frozen=True)
class Samples:
    """Empirical law of equally weighted points (rows of an (n, d) array)."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim <= 1:
            pts = pts.reshape(-1, 1)
        if pts.shape[0] == 0:
            raise InputError("samples: need at least one point")
        if not np.all(np.isfinite(pts)):
            raise InputError("samples: points must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_csv(cls, path) -> "Samples":
        """Headerless CSV, one point per row, d columns."""
        try:
            pts = np.loadtxt(path, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise InputError(f"samples file {path}: {exc}") from None
        return cls(pts)


@dataclass(frozen=True)
class DiracAt:
    """Point mass at ``point``."""

    point: np.ndarray = 0.0

    def __post_init__(self):
        object.__setattr__(self, "point", np.atleast_1d(np.asarray(self.point, dtype=float)))

    @property
    def dim(self) -> int:
        return self.point.size


class Density:
    """One-dimensional density on a finite support ``[lo, hi]``.

    The density must integrate to one within 1e-6 unless ``normalize`` is
    set, in which case it is divided by its integral.
    """

    dim = 1

    def __init__(self, pdf, support, normalize: bool = False):
        lo, hi = (float(s) for s in support)
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise InputError(f"density support must be a finite interval, got {support}")
        self.support = (lo, hi)
        # plain callables are expected to be numpy-vectorised
        self._pdf = pdf if isinstance(pdf, Coefficient) else (
            Coefficient(pdf, 1, (), vectorized=True) if callable(pdf) else as_coefficient(pdf, 1, ()))
        total = quadrature.integrate(self._raw, lo, hi, rtol=1e-12, atol=1e-15).value.real
        if not total > 0:
            raise InputError("density must have positive mass on its support")
        if normalize:
            self.norm = total
        elif abs(total - 1.0) > 1e-6:
            raise InputError(f"density integrates to {total:.9g}, not 1 (pass normalize=True)")
        else:
            self.norm = 1.0

    def _raw(self, x):
        return self._pdf(x)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.support[0]) & (x <= self.support[1])
        vals = self._pdf(x.ravel()).reshape(x.shape) / self.norm
        return np.where(inside, vals, 0.0)

    def __repr__(self):
        return f"Density(support={self.support}, norm={self.norm:.12g})"


Measure = Union[GaussianParam, Samples, DiracAt, Density]
Weight = Union[None, Polynomial, Callable[[np.ndarray], np.ndarray]]


def _frequency(mu, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.size != mu.dim:
        raise InputError(f"frequency has dimension {xi.size}, measure {mu.dim}")
    if not np.all(np.isfinite(xi)):
        raise InputError("frequency must be finite")
    return xi


def _weight_values(g: Weight, x: np.ndarray) -> np.ndarray:
    if g is None:
        return np.ones(x.shape[0], dtype=complex)
    if isinstance(g, Polynomial):
        return g(x[:, 0]).astype(complex)
    return np.asarray(g(x), dtype=complex).reshape(x.shape[0])


def gaussian_moment_transform(mean: float, variance: float, poly: Polynomial, xi: float) -> complex:
    """``int e^{ix xi} poly(x) N(mean, variance)(dx)`` in closed form.

    Under the tilted measure the state is ``N(mean + i variance xi, variance)``,
    so ``int e^{ix xi} x^k dN = phi(xi) M_k`` with the Gaussian moment
    recursion ``M_k = c M_{k-1} + (k-1) v M_{k-2}``.
    """
    c = complex(mean, variance * xi)
    coef = np.asarray(poly.coef, dtype=complex)
    moments = np.empty(coef.size, dtype=complex)
    moments[0] = 1.0
    if coef.size > 1:
        moments[1] = c
    for k in range(2, coef.size):
        moments[k] = c * moments[k - 1] + (k - 1) * variance * moments[k - 2]
    phi = np.exp(1j * mean * xi - 0.5 * variance * xi * xi)
    return complex(phi * (coef @ moments))


def _oscillatory(f, lo, hi, xi, rtol, atol) -> TransformValue:
    w = abs(float(xi))
    width = math.pi / (4 * w) if w > 0 else math.inf
    res = quadrature.integrate(f, lo, hi, max_width=width, rtol=rtol, atol=atol)
    return TransformValue(res.value, res.error)


def weighted_transform(mu: Measure, g: Weight, xi, *, method: str = "auto",
                       rtol: float = RTOL, atol: float = ATOL) -> TransformValue:
    """``int e^{i x'xi} g(x) mu(dx)`` with an error estimate.

    Parameters
    ----------
    method : {"auto", "closed", "quadrature"}
        For Gaussian measures, ``auto`` uses the closed form whenever ``g`` is
        a polynomial (or None).  ``quadrature`` forces numerical integration.
    """
    xi = _frequency(mu, xi)
    if isinstance(mu, DiracAt):
        x = mu.point.reshape(1, -1)
        return TransformValue(complex(np.exp(1j * x[0] @ xi) * _weight_values(g, x)[0]), 0.0)
    if isinstance(mu, Samples):
        x = mu.points
        vals = np.exp(1j * (x @ xi)) * _weight_values(g, x)
        n = vals.size
        err = float(np.sqrt((vals.real.var(ddof=1) + vals.imag.var(ddof=1)) / n)) if n > 1 else 0.0
        return TransformValue(complex(vals.mean()), err)
    if isinstance(mu, GaussianParam):
        closed_ok = g is None or (isinstance(g, Polynomial) and mu.dim == 1)
        if method == "closed" and not closed_ok:
            raise InputError("closed form needs a polynomial weight on a 1-d Gaussian")
        if closed_ok and method != "quadrature":
            if g is None:
                return TransformValue(complex(np.exp(1j * mu.mean @ xi - 0.5 * mu.variance @ (xi * xi))), 0.0)
            return TransformValue(gaussian_moment_transform(mu.mean[0], mu.variance[0], g, xi[0]), 0.0)
        if mu.dim != 1:
            raise UnsupportedDimension("quadrature transforms of Gaussian measures need d = 1")
        sd = math.sqrt(mu.variance[0])
        lo, hi = mu.mean[0] - GAUSS_TRUNCATION * sd, mu.mean[0] + GAUSS_TRUNCATION * sd

        def f(x):
            return np.exp(1j * x * xi[0]) * _weight_values(g, x[:, None]) * mu.pdf(x)

        return _oscillatory(f, lo, hi, xi[0], rtol, atol)
    if isinstance(mu, Density):
        if method == "closed":
            raise InputError("no closed form for general densities")

        def f(x):
            return np.exp(1j * x * xi[0]) * _weight_values(g, x[:, None]) * mu(x)

        return _oscillatory(f, mu.support[0], mu.support[1], xi[0], rtol, atol)
    raise InputError(f"unsupported measure {type(mu).__name__}")


def char_fn(mu: Measure, xi, **kwargs) -> TransformValue:
    """Characteristic function ``phi_mu(xi) = int e^{i x'xi} mu(dx)``."""
    if not np.any(np.asarray(xi, dtype=float)) and not isinstance(mu, Density):
        _frequency(mu, xi)
        return TransformValue(1 + 0j, 0.0)
    return weighted_transform(mu, None, xi, **kwargs)
