"""Probabilistic symbols ``p(x, xi)`` of Itô processes.

Every constructor returns an immutable :class:`Symbol`.  Evaluation is
batched over the state variable: ``sym.batch(x, xi)`` takes ``x`` of shape
``(m, d)`` and one frequency ``xi`` of shape ``(d,)``.

Gaussian parts follow the canonical convention ``1/2 xi'Q(x)xi`` (Brownian
motion has exponent ``u^2/2``).  :func:`symbol_diffusion` accepts
``paper_mode=True`` to drop the factor 1/2 (Brownian motion then has
exponent ``u^2`` and OU has stationary variance ``sigma^2 / lambda``).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial

from .coef import Coefficient, as_coefficient
from .errors import InputError, UnsupportedDimension
from .levy import JumpMeasure, LevyTriplet, jump_exponent, levy_exponent, stable_constant


class SymbolForm(enum.Enum):
    FROM_CHARACTERISTICS = "from_characteristics"
    LEVY_CONSTANT = "levy_constant"
    OU_TYPE = "ou_type"
    ADDITIVE = "additive"
    DIFFUSION = "diffusion"
    GOU = "gou"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Symbol:
    """An evaluable symbol with metadata.

    ``fn(x, xi)`` maps a batch ``x`` of shape (m, d) and a frequency of shape
    (d,) to m complex values.  ``poly(xi)``, when available (d = 1 only),
    returns ``p(., xi)`` as a complex polynomial in x.
    """

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    form: SymbolForm
    dim: int = 1
    poly: Optional[Callable[[np.ndarray], Optional[Polynomial]]] = None
    notes: tuple = ()
    params: dict = field(default_factory=dict)

    def batch(self, x, xi) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1, self.dim)
        xi = _frequency(xi, self.dim)
        if not np.any(xi):
            return np.zeros(x.shape[0], dtype=complex)
        return np.asarray(self.fn(x, xi), dtype=complex).reshape(x.shape[0])

    def __call__(self, x, xi) -> complex:
        return symbol_eval(self, x, xi)

    def x_polynomial(self, xi) -> Optional[Polynomial]:
        """``x -> p(x, xi)`` as a polynomial, or None if not polynomial/known."""
        if self.poly is None or self.dim != 1:
            return None
        xi = _frequency(xi, 1)
        if not np.any(xi):
            return Polynomial([0j])
        return self.poly(xi)


def _frequency(xi, d: int) -> np.ndarray:
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.size != d:
        raise InputError(f"frequency has dimension {xi.size}, symbol expects {d}")
    if not np.all(np.isfinite(xi)):
        raise InputError("frequency must be finite")
    return xi


def symbol_eval(sym: Symbol, x, xi) -> complex:
    """``p(x, xi)`` at a single point."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != sym.dim:
        raise InputError(f"state has dimension {x.size}, symbol expects {sym.dim}")
    return complex(sym.batch(x.reshape(1, -1), xi)[0])


def _cpoly(coef) -> Polynomial:
    return Polynomial(np.asarray(coef, dtype=complex))


def _exponent_poly(triplet: LevyTriplet, inner: Polynomial) -> Optional[Polynomial]:
    """``psi(inner(x))`` as a polynomial in x, for scalar jump-free triplets."""
    if triplet.dim != 1 or not triplet.is_gaussian:
        return None
    ell = triplet.drift[0]
    q = triplet.gaussian[0, 0]
    return _cpoly([0]) + (-1j * ell) * inner + 0.5 * q * inner * inner


# ---------------------------------------------------------------------------
# constructors

def zero_symbol(dim: int = 1) -> Symbol:
    """Symbol of the zero process."""
    return Symbol(lambda x, xi: np.zeros(x.shape[0], dtype=complex), SymbolForm.LEVY_CONSTANT,
                  dim, poly=lambda xi: _cpoly([0]))


def levy_symbol(triplet: LevyTriplet) -> Symbol:
    """x-independent symbol ``p(x, xi) = psi(xi)`` of a Lévy process."""

    def fn(x, xi):
        return np.full(x.shape[0], levy_exponent(triplet, xi), dtype=complex)

    return Symbol(fn, SymbolForm.LEVY_CONSTANT, triplet.dim,
                  poly=lambda xi: _cpoly([levy_exponent(triplet, xi)]),
                  params={"triplet": triplet})


@dataclass(frozen=True)
class DifferentialCharacteristics:
    """State-dependent characteristics ``(ell(x), Q(x), N(x, dy))``.

    ``ell`` and ``q`` may be constants, polynomials (d = 1) or callables
    (numpy-vectorised ones if ``vectorized``); ``jumps`` is either a fixed
    :data:`JumpMeasure` or a callable ``x -> JumpMeasure`` probed point by
    point.
    """

    ell: object
    q: object
    jumps: object = None
    dim: int = 1
    vectorized: bool = False

    def __post_init__(self):
        d, vec = self.dim, self.vectorized
        object.__setattr__(self, "ell", as_coefficient(self.ell, d, (d,), vectorized=vec))
        object.__setattr__(self, "q", as_coefficient(self.q, d, (d, d), vectorized=vec))

    def jumps_at(self, x) -> JumpMeasure:
        return self.jumps(x if self.dim > 1 else float(np.asarray(x).ravel()[0])) if callable(self.jumps) else self.jumps


def symbol_from_characteristics(chars: DifferentialCharacteristics) -> Symbol:
    """``p(x,xi) = -i ell(x)'xi + 1/2 xi'Q(x)xi - int (e^{iy'xi}-1-iy'xi chi(y)) N(x,dy)``."""
    d = chars.dim

    def fn(x, xi):
        ell = chars.ell(x)                              # (m, d)
        q = chars.q(x)                                  # (m, d, d)
        if np.any(np.abs(q - np.swapaxes(q, 1, 2)) > 1e-12 * (1 + np.abs(q))):
            raise InputError("Q(x) must be symmetric")
        out = -1j * (ell @ xi) + 0.5 * np.einsum("i,mij,j->m", xi, q, xi)
        if chars.jumps is None:
            return out
        u = xi.reshape(1, d)
        if not callable(chars.jumps):
            return out + jump_exponent(chars.jumps, u)[0]
        for k, row in enumerate(x):
            out[k] += jump_exponent(chars.jumps_at(row), u)[0]
        return out

    poly = None
    if d == 1 and chars.ell.poly is not None and chars.q.poly is not None and not callable(chars.jumps):
        def poly(xi):
            base = (-1j * xi[0]) * chars.ell.poly + 0.5 * xi[0] ** 2 * chars.q.poly
            jump = jump_exponent(chars.jumps, xi.reshape(1, 1))[0]
            return _cpoly([jump]) + base

    return Symbol(fn, SymbolForm.FROM_CHARACTERISTICS, d, poly=poly, params={"chars": chars})


def _dispersion(phi, d: int, n: int) -> Coefficient:
    c = as_coefficient(phi, d, (d, n))
    if c.out_shape != (d, n):
        raise InputError(f"dispersion must map to {d}x{n} matrices")
    return c


def symbol_ou_type(a: float, phi, driver: LevyTriplet, dim: int = 1) -> Symbol:
    """Symbol of ``dX = -aX dt + Phi(X-) dL``: ``psi_L(Phi(x)'xi) + i a x'xi``."""
    n = driver.dim
    phi = _dispersion(phi, dim, n)

    def fn(x, xi):
        u = np.einsum("mij,i->mj", phi(x), xi)
        return levy_exponent(driver, u) + 1j * a * (x @ xi)

    poly = None
    if dim == 1 and n == 1 and phi.poly is not None:
        if phi.is_constant:
            def poly(xi):
                return _cpoly([levy_exponent(driver, phi.poly.coef[0] * xi[0]), 1j * a * xi[0]])
        elif driver.is_gaussian:
            def poly(xi):
                return _exponent_poly(driver, xi[0] * phi.poly) + _cpoly([0, 1j * a * xi[0]])

    return Symbol(fn, SymbolForm.OU_TYPE, dim, poly=poly,
                  params={"a": a, "phi": phi, "driver": driver})


def symbol_additive(b: float, phi, driver_l: LevyTriplet, driver_z: LevyTriplet) -> Symbol:
    """Symbol of ``dX = b dZ + Phi(X-) dL``: ``psi_L(Phi(x)'xi) + psi_Z(b xi)``."""
    d, n = driver_z.dim, driver_l.dim
    phi = _dispersion(phi, d, n)

    def fn(x, xi):
        u = np.einsum("mij,i->mj", phi(x), xi)
        return levy_exponent(driver_l, u) + levy_exponent(driver_z, b * xi)

    poly = None
    if d == 1 and n == 1 and phi.poly is not None and (phi.is_constant or driver_l.is_gaussian):
        def poly(xi):
            zpart = _cpoly([levy_exponent(driver_z, b * xi)])
            if phi.is_constant:
                return zpart + _cpoly([levy_exponent(driver_l, phi.poly.coef[0] * xi[0])])
            return zpart + _exponent_poly(driver_l, xi[0] * phi.poly)

    return Symbol(fn, SymbolForm.ADDITIVE, d, poly=poly,
                  params={"b": b, "phi": phi, "driver_l": driver_l, "driver_z": driver_z})


def symbol_diffusion(a: float, phi, dim: int = 1, n: Optional[int] = None,
                     paper_mode: bool = False) -> Symbol:
    """Symbol of ``dX = -aX dt + Phi(X) dW``.

    Canonical: ``1/2 |Phi(x)'xi|^2 + i a x'xi``.  With ``paper_mode`` the
    Gaussian term is ``|Phi(x)'xi|^2`` (no 1/2).
    """
    n = dim if n is None else n
    phi = _dispersion(phi, dim, n)
    factor = 1.0 if paper_mode else 0.5

    def fn(x, xi):
        u = np.einsum("mij,i->mj", phi(x), xi)
        return factor * np.sum(u * u, axis=1) + 1j * a * (x @ xi)

    poly = None
    if dim == 1 and n == 1 and phi.poly is not None:
        def poly(xi):
            return factor * xi[0] ** 2 * _cpoly(phi.poly.coef) ** 2 + _cpoly([0, 1j * a * xi[0]])

    return Symbol(fn, SymbolForm.DIFFUSION, dim, poly=poly,
                  params={"a": a, "phi": phi, "paper_mode": paper_mode})


def symbol_gou(driver_u: LevyTriplet, driver_l: LevyTriplet) -> Symbol:
    """Symbol of the generalised OU process ``dX = X- dU + dL``: ``psi_U(x xi) + psi_L(xi)``."""
    if driver_u.dim != 1 or driver_l.dim != 1:
        raise UnsupportedDimension("generalised OU symbols are defined for d = 1 only")

    def fn(x, xi):
        return levy_exponent(driver_u, x * xi[0]) + levy_exponent(driver_l, xi[0])

    poly = None
    if driver_u.is_gaussian:
        def poly(xi):
            return _exponent_poly(driver_u, _cpoly([0, xi[0]])) + _cpoly([levy_exponent(driver_l, xi[0])])

    return Symbol(fn, SymbolForm.GOU, 1, poly=poly,
                  params={"driver_u": driver_u, "driver_l": driver_l})


def symbol_stable_noise(a1: float, a2: float, alpha: float, beta, dim: int = 1) -> Symbol:
    """``p(x,xi) = -i beta(x)'xi + a1|xi|^2 - a2 c_alpha |xi|^alpha``.

    ``Z`` has the unnormalised Lévy measure ``|y|^{-(d+alpha)} dy``, so
    ``psi_Z(u) = -c_alpha |u|^alpha``.  The jump weight enters linearly:
    this is the symbol of ``dX = sqrt(2 a1) dW + beta(X) dt + a2^{1/alpha} dZ``
    (the SDE with ``a2 dZ`` carries ``a2^alpha`` instead).
    """
    if a1 < 0 or a2 < 0 or a1 + a2 <= 0:
        raise InputError("need a1, a2 >= 0 with a1 + a2 > 0")
    beta = as_coefficient(beta, dim, (dim,))
    c_alpha = stable_constant(alpha, dim)

    def fn(x, xi):
        r = np.linalg.norm(xi)
        return -1j * (beta(x) @ xi) + a1 * r ** 2 - a2 * c_alpha * r ** alpha

    return Symbol(fn, SymbolForm.ADDITIVE, dim,
                  params={"a1": a1, "a2": a2, "alpha": alpha, "beta": beta})


def custom_symbol(fn: Callable, dim: int = 1) -> Symbol:
    """Wrap a user callable ``fn(x_batch, xi) -> complex array`` as a symbol."""
    return Symbol(fn, SymbolForm.CUSTOM, dim)
