"""Scale density, speed density and stationary law of 1-d diffusions.

For ``dX = b(X) dt + sigma(X) dW``

    s(x) = exp(-2 int_{x0}^x b/sigma^2 du),   m(x) = 1 / (sigma^2(x) s(x)),

and, when ``int s = inf`` and ``M = int m < inf``, the stationary density is
``pi = m / M``.  The inner integral is tabulated once as a Chebyshev series
and integrated exactly, so ``s`` costs one series evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Chebyshev
from scipy.integrate import trapezoid

from . import quadrature
from .errors import EvaluationError, HypothesisViolation, InputError

#: Window growth stops once m(+-L) / max m falls below this ratio.
TAIL_RATIO = 1e-12
MAX_WINDOW = 1e4
#: ``int s`` over the window above this value counts as divergent.
DIVERGENCE_LEVEL = 1e12
CHEB_RTOL = 1e-13
MAX_DEGREE = 4096


def _vectorize(f):
    def g(x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(f(x), dtype=float)
        if out.shape != x.shape:
            out = np.broadcast_to(out, x.shape).copy() if out.size == 1 else np.array([f(v) for v in x.ravel()]).reshape(x.shape)
        return out
    return g


@dataclass
class Diffusion1D:
    """``dX = b(X) dt + sigma(X) dW`` on ``support`` (may be infinite)."""

    b: Callable
    sigma: Callable
    x0: float = 0.0
    support: tuple = (-math.inf, math.inf)
    _tab: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        self.b = _vectorize(self.b)
        self.sigma = _vectorize(self.sigma)
        lo, hi = (float(v) for v in self.support)
        if not lo < hi:
            raise InputError("support must be a nonempty interval")
        if not lo <= self.x0 <= hi:
            raise InputError("reference point x0 must lie in the support")
        self.support = (lo, hi)

    @classmethod
    def cosh(cls, theta: float = 1.0, c: float = 1.0, x0: float = 0.0) -> "Diffusion1D":
        """``b = -(theta + c^2/(2 cosh x)) sinh x / cosh^2 x``, ``sigma = c / cosh x``."""
        if not (theta > 0 and c > 0):
            raise InputError("theta and c must be positive")
        return cls(lambda x: -(theta + c * c / (2 * np.cosh(x))) * np.sinh(x) / np.cosh(x) ** 2,
                   lambda x: c / np.cosh(x), x0)

    def ratio(self, x):
        """``b / sigma^2``, the integrand of the scale exponent."""
        sig = self.sigma(x)
        if np.any(~(sig > 0)):
            raise InputError("sigma must be positive on the support")
        return self.b(x) / sig ** 2

    def _antiderivative(self, lo: float, hi: float) -> Chebyshev:
        key = (lo, hi)
        if key not in self._tab:
            deg = 32
            while True:
                cheb = Chebyshev.interpolate(self.ratio, deg, domain=[lo, hi])
                tail = np.abs(cheb.coef[-4:]).max()
                if tail <= CHEB_RTOL * max(1.0, np.abs(cheb.coef).max()) or deg >= MAX_DEGREE:
                    break
                deg *= 2
            if tail > 1e-9 * max(1.0, np.abs(cheb.coef).max()):
                raise EvaluationError(f"b/sigma^2 is not resolved by a degree-{deg} Chebyshev series")
            anti = cheb.integ()
            self._tab[key] = anti - anti(self.x0)
        return self._tab[key]

    def window(self) -> tuple:
        """Finite interval carrying all but ~1e-12 of the speed measure."""
        lo, hi = self.support
        if math.isfinite(lo) and math.isfinite(hi):
            return lo, hi
        half = 1.0
        while half <= MAX_WINDOW:
            a = lo if math.isfinite(lo) else self.x0 - half
            z = hi if math.isfinite(hi) else self.x0 + half
            xs = np.linspace(a, z, 2001)
            m = _speed(self, xs, (a, z))
            top = m.max()
            if not np.isfinite(top):
                raise HypothesisViolation("the speed density overflows: M = int m is infinite")
            ends = [m[i] for i, inf in ((0, not math.isfinite(lo)), (-1, not math.isfinite(hi))) if inf]
            if top > 0 and all(e <= TAIL_RATIO * top for e in ends):
                return a, z
            half *= 2
        raise HypothesisViolation(
            "the speed measure does not decay within |x| <= %g: M = int m appears infinite" % MAX_WINDOW)


def _exponent(diff: Diffusion1D, x, win) -> np.ndarray:
    """``int_{x0}^x b/sigma^2``, exactly zero at ``x0``."""
    x = np.asarray(x, dtype=float)
    return np.where(x == diff.x0, 0.0, diff._antiderivative(*win)(x))


def _scale(diff: Diffusion1D, x, win) -> np.ndarray:
    return np.exp(-2.0 * _exponent(diff, x, win))


def _speed(diff: Diffusion1D, x, win) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    # 1 / (sigma^2 s) computed in log space to avoid overflow of s
    return np.exp(2.0 * _exponent(diff, x, win) - 2.0 * np.log(diff.sigma(x)))


def _in_support(diff: Diffusion1D, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < diff.support[0]) or np.any(x > diff.support[1]):
        raise InputError("x outside the declared support")
    return x


def _covering_window(diff: Diffusion1D, x) -> tuple:
    x = np.atleast_1d(x)
    lo, hi = min(float(x.min()), diff.x0), max(float(x.max()), diff.x0)
    try:
        a, z = diff.window()
    except HypothesisViolation:
        # s and m stay well defined without a finite speed measure
        a, z = lo - 1.0, hi + 1.0
    return min(a, lo), max(z, hi)


def scale_density(diff: Diffusion1D, x):
    """``s(x) = exp(-2 int_{x0}^x b/sigma^2 du)``; ``s(x0) = 1``."""
    x = _in_support(diff, x)
    return _scale(diff, x, _covering_window(diff, x))


def speed_density(diff: Diffusion1D, x):
    """``m(x) = 1 / (sigma(x)^2 s(x))``."""
    x = _in_support(diff, x)
    return _speed(diff, x, _covering_window(diff, x))


@dataclass
class StationaryDensityResult:
    """``pi = m / M`` on ``window`` with quadrature diagnostics."""

    diffusion: Diffusion1D
    window: tuple
    M: float
    M_error: float
    scale_integral: float
    scale_diverges: bool
    mass_check: float

    def pi(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.window[0]) & (x <= self.window[1])
        vals = _speed(self.diffusion, np.clip(x, *self.window), self.window) / self.M
        return np.where(inside, vals, 0.0)

    __call__ = pi

    def to_density(self):
        """The stationary law as a :class:`symcrit.measure.Density`."""
        from .measure import Density
        return Density(self.pi, self.window)

    def table(self, grid) -> np.ndarray:
        grid = np.asarray(grid, dtype=float)
        return np.column_stack([grid, self.pi(grid)])


def stationary_density(diff: Diffusion1D) -> StationaryDensityResult:
    """Normalised speed density; raises :class:`HypothesisViolation` if ``M`` is infinite."""
    win = diff.window()
    res = quadrature.integrate(lambda x: _speed(diff, x, win), *win, rtol=1e-12, atol=0.0)
    M = res.value.real
    if not (math.isfinite(M) and M > 0):
        raise HypothesisViolation(f"speed measure total mass is not finite and positive (M = {M})")
    # recurrence indicator: int s over the window, in log space
    xs = np.linspace(*win, 4001)
    log_s = -2.0 * _exponent(diff, xs, win)
    top = log_s.max()
    with np.errstate(over="ignore"):
        s_int = float(np.exp(top) * trapezoid(np.exp(log_s - top), xs))     # inf is a valid answer
    result = StationaryDensityResult(diff, win, M, res.error, s_int, s_int > DIVERGENCE_LEVEL, math.nan)
    mass = quadrature.integrate(result.pi, *win, rtol=1e-12, atol=0.0).value.real
    result.mass_check = mass
    return result


def fokker_planck_residual(diff: Diffusion1D, pi: Callable, x: float) -> float:
    """``|1/2 (sigma^2 pi)'(x) - b(x) pi(x)|`` by central differences.

    The first integral of the stationary Fokker–Planck equation; zero for
    the stationary density of a recurrent diffusion.
    """
    x = float(x)
    h = 1e-5 * (1.0 + abs(x))
    lo, hi = diff.support
    if x - h < lo or x + h > hi:
        raise InputError("finite-difference stencil leaves the support")
    f = lambda v: float(diff.sigma(np.array(v)) ** 2 * np.asarray(pi(np.array(v))))
    deriv = (f(x + h) - f(x - h)) / (2 * h)
    return abs(0.5 * deriv - float(diff.b(np.array(x))) * float(np.asarray(pi(np.array(x)))))
