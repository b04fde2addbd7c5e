"""Lévy triplets and the Lévy–Khintchine exponent.

The exponent is

    psi(xi) = -i ell'xi + 1/2 xi'Q xi - int (e^{i xi'y} - 1 - i xi'y chi(y)) N(dy)

with the cut-off ``chi(y) = 1{|y| < 1}``.  Only the jump measures listed in
:data:`JumpMeasure` are supported.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate, special

from .errors import EvaluationError, InputError

#: Relative tolerance of the annulus quadrature.
ANNULUS_RTOL = 1e-9


def cutoff(y) -> np.ndarray:
    """Indicator cut-off ``1{|y| < 1}`` along the last axis (scalars allowed)."""
    y = np.asarray(y, dtype=float)
    norm = np.abs(y) if y.ndim == 0 else np.linalg.norm(y, axis=-1)
    return (norm < 1.0).astype(float)


@dataclass(frozen=True)
class Atoms:
    """Finite jump measure ``sum_i r_i delta_{y_i}``."""

    locations: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float)
        if loc.ndim <= 1:
            loc = loc.reshape(-1, 1)
        mass = np.asarray(self.masses, dtype=float).reshape(-1)
        if loc.shape[0] != mass.shape[0]:
            raise InputError("atoms: locations and masses differ in length")
        if np.any(mass <= 0) or not np.all(np.isfinite(mass)):
            raise InputError("atoms: masses must be finite and strictly positive")
        if np.any(np.linalg.norm(loc, axis=1) == 0):
            raise InputError("atoms: no atom may sit at the origin")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "masses", mass)

    @property
    def dim(self) -> int:
        return self.locations.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())


@dataclass(frozen=True)
class DensityOnAnnulus:
    """One-dimensional jump density on ``eps <= |y| <= radius``.

    Jumps smaller than ``eps`` are not integrated; their contribution enters
    as ``small_jump_variance = int_{|y|<eps} y^2 N(dy)``, which is added to
    the Gaussian variance.
    """

    density: Callable[[float], float]
    eps: float
    radius: float
    small_jump_variance: float = 0.0

    def __post_init__(self):
        if not (0 < self.eps < self.radius) or not math.isfinite(self.radius):
            raise InputError("annulus: need 0 < eps < radius < inf")
        if self.small_jump_variance < 0:
            raise InputError("annulus: small_jump_variance must be >= 0")

    @property
    def dim(self) -> int:
        return 1

    def _pieces(self):
        # split at |y| = 1 where the compensator switches off
        lo, hi = self.eps, self.radius
        pieces = []
        for a, b in ((lo, min(hi, 1.0)), (max(lo, 1.0), hi)):
            if b > a:
                pieces += [(a, b), (-b, -a)]
        return pieces

    def integral(self, f: Callable[[float], float]) -> float:
        """``int f(y) density(y) dy`` over the annulus, checked for convergence."""
        total = 0.0
        for a, b in self._pieces():
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                val, err, *rest = integrate.quad(
                    lambda y: f(y) * self.density(y), a, b,
                    epsabs=1e-13, epsrel=ANNULUS_RTOL, limit=200, full_output=1)
            if len(rest) > 1 and rest[1]:
                raise EvaluationError(f"annulus quadrature on [{a}, {b}] failed: {rest[1]}")
            total += val
        return total

    @property
    def total_mass(self) -> float:
        return self.integral(lambda y: 1.0)

    def compensator_drift(self) -> float:
        """``int_{eps <= |y| < 1} y N(dy)``, the drift removed by the cut-off."""
        total = 0.0
        for a, b in self._pieces():
            if b <= 1.0 and a >= -1.0:
                total += integrate.quad(lambda y: y * self.density(y), a, b, epsrel=ANNULUS_RTOL)[0]
        return total


def stable_constant(alpha: float, d: int = 1) -> float:
    """``c_alpha = int (cos(u'y) - 1) |y|^{-(d+alpha)} dy`` for a unit vector ``u``.

    Closed form of the rotationally invariant integral; always negative.

    >>> round(stable_constant(1.0, 1), 12) == round(-math.pi, 12)
    True
    """
    if not (0.0 < alpha < 2.0) or not math.isfinite(alpha):
        raise InputError(f"stable index must lie in (0, 2), got {alpha}")
    if int(d) != d or d < 1:
        raise InputError(f"dimension must be a positive integer, got {d}")
    return -(math.pi ** (d / 2) * special.gamma(1 - alpha / 2)
             / (alpha * 2 ** (alpha - 1) * special.gamma((d + alpha) / 2)))


@dataclass(frozen=True)
class StableSymmetric:
    """Rotationally symmetric alpha-stable jumps with ``psi(xi) = scale |xi|^alpha``.

    The Lévy measure is ``k |y|^{-(d+alpha)} dy`` with
    ``k = scale / (-c_alpha)``; see :func:`stable_constant`.
    """

    alpha: float
    scale: float = 1.0
    dim: int = 1

    def __post_init__(self):
        if not (0.0 < self.alpha < 2.0):
            raise InputError(f"stable index must lie in (0, 2), got {self.alpha}")
        if not self.scale > 0:
            raise InputError("stable scale must be positive")

    @property
    def levy_density_constant(self) -> float:
        return self.scale / -stable_constant(self.alpha, self.dim)


JumpMeasure = Union[None, Atoms, DensityOnAnnulus, StableSymmetric]


@dataclass(frozen=True)
class LevyTriplet:
    """Characteristic triplet ``(ell, Q, N)`` per unit time."""

    drift: np.ndarray = field(default_factory=lambda: np.zeros(1))
    gaussian: np.ndarray = field(default_factory=lambda: np.zeros((1, 1)))
    jumps: JumpMeasure = None

    def __post_init__(self):
        drift = np.atleast_1d(np.asarray(self.drift, dtype=float))
        d = drift.shape[0]
        q = np.asarray(self.gaussian, dtype=float)
        if q.ndim == 0:
            q = np.eye(d) * float(q)
        elif q.ndim == 1 and q.size == d:
            q = np.diag(q)
        if q.shape != (d, d):
            raise InputError(f"gaussian part must be {d}x{d}, got {q.shape}")
        if not (np.all(np.isfinite(drift)) and np.all(np.isfinite(q))):
            raise InputError("triplet entries must be finite")
        q = 0.5 * (q + q.T)
        if np.linalg.eigvalsh(q).min() < -1e-12:
            raise InputError("gaussian part must be positive semi-definite")
        if self.jumps is not None and self.jumps.dim != d:
            raise InputError(f"jump measure has dimension {self.jumps.dim}, triplet {d}")
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "gaussian", q)

    @property
    def dim(self) -> int:
        return self.drift.shape[0]

    @classmethod
    def zero(cls, dim: int = 1) -> "LevyTriplet":
        return cls(np.zeros(dim), np.zeros((dim, dim)))

    @classmethod
    def brownian(cls, variance=1.0, dim: int = 1) -> "LevyTriplet":
        return cls(np.zeros(dim), np.eye(dim) * variance if np.ndim(variance) == 0 else variance)

    @classmethod
    def deterministic(cls, drift) -> "LevyTriplet":
        drift = np.atleast_1d(np.asarray(drift, dtype=float))
        return cls(drift, np.zeros((drift.size, drift.size)))

    @classmethod
    def stable(cls, alpha: float, scale: float = 1.0, dim: int = 1) -> "LevyTriplet":
        return cls(np.zeros(dim), np.zeros((dim, dim)), StableSymmetric(alpha, scale, dim))

    @property
    def is_gaussian(self) -> bool:
        """No jump part: the exponent is a quadratic polynomial."""
        return self.jumps is None

    def effective_gaussian(self) -> np.ndarray:
        """Gaussian matrix including an annulus small-jump correction."""
        if isinstance(self.jumps, DensityOnAnnulus):
            return self.gaussian + self.jumps.small_jump_variance
        return self.gaussian


def _as_frequencies(xi, d: int) -> tuple[np.ndarray, bool]:
    u = np.asarray(xi, dtype=float)
    single = u.ndim == 0 or (u.ndim == 1 and d > 1) or (u.ndim == 1 and d == 1 and u.size == 1)
    if u.ndim == 0:
        u = u.reshape(1, 1)
    elif u.ndim == 1:
        u = u.reshape(1, d) if single else u.reshape(-1, 1)
    if u.shape[-1] != d:
        raise InputError(f"frequency has dimension {u.shape[-1]}, triplet {d}")
    if not np.all(np.isfinite(u)):
        raise InputError("frequency must be finite")
    return u, single


def jump_exponent(jumps: JumpMeasure, u: np.ndarray) -> np.ndarray:
    """``-int (e^{iu'y} - 1 - iu'y chi(y)) N(dy)`` for a batch ``u`` of shape (m, d)."""
    m = u.shape[0]
    if jumps is None:
        return np.zeros(m, dtype=complex)
    if isinstance(jumps, StableSymmetric):
        return (jumps.scale * np.linalg.norm(u, axis=1) ** jumps.alpha).astype(complex)
    if isinstance(jumps, Atoms):
        phase = u @ jumps.locations.T                       # (m, k)
        comp = phase * cutoff(jumps.locations)[None, :]
        return -((np.exp(1j * phase) - 1.0 - 1j * comp) @ jumps.masses)
    if isinstance(jumps, DensityOnAnnulus):
        out = np.empty(m, dtype=complex)
        for j, uj in enumerate(u[:, 0]):
            if uj == 0.0:
                out[j] = 0.0
                continue
            re = jumps.integral(lambda y: 1.0 - math.cos(uj * y))
            im = jumps.integral(lambda y: uj * y * (abs(y) < 1.0) - math.sin(uj * y))
            out[j] = complex(re, im)
        return out
    raise InputError(f"unsupported jump measure {type(jumps).__name__}")


def levy_exponent(triplet: LevyTriplet, xi) -> Union[complex, np.ndarray]:
    """Evaluate the Lévy–Khintchine exponent.

    Parameters
    ----------
    triplet : LevyTriplet
    xi : float or array_like
        A single frequency (scalar for d = 1, shape (d,) otherwise) or a batch
        of shape (m, d).  A 1-d array for a one-dimensional triplet is read as
        a batch of scalar frequencies.

    Returns
    -------
    complex or ndarray of complex
    """
    u, single = _as_frequencies(xi, triplet.dim)
    q = triplet.effective_gaussian()
    quad = 0.5 * np.einsum("mi,ij,mj->m", u, q, u)
    out = -1j * (u @ triplet.drift) + quad + jump_exponent(triplet.jumps, u)
    return complex(out[0]) if single else out
