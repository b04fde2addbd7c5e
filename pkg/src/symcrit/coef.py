"""State-dependent coefficients (drift, dispersion matrices, densities).

A :class:`Coefficient` normalises the various ways a user may hand over a
map ``x -> value``: a constant, a :class:`numpy.polynomial.Polynomial`, a
scalar-at-a-time callable or a numpy-vectorised callable.  Every
coefficient is evaluated in batches of shape ``(m, d)``.
"""
from __future__ import annotations

import copy
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import InputError


class Coefficient:
    """Batched evaluation of ``x -> f(x)`` with a fixed output shape.

    Parameters
    ----------
    fn : callable
        For ``dim == 1`` the callable receives a float (or a 1-d array when
        ``vectorized``); otherwise a ``(d,)`` array (or ``(m, d)``).
    dim : int
        State-space dimension.
    out_shape : tuple of int
        Shape of a single value, ``()`` for scalars.
    vectorized : bool
        Whether ``fn`` accepts a whole batch at once.
    poly : Polynomial, optional
        Exact polynomial form of a scalar 1-d coefficient. Enables the
        closed-form Gaussian transforms.
    """

    def __init__(self, fn: Callable, dim: int = 1, out_shape: Sequence[int] = (),
                 vectorized: bool = False, poly: Optional[Polynomial] = None):
        self.fn = fn
        self.dim = int(dim)
        self.out_shape = tuple(out_shape)
        self.vectorized = vectorized
        self.poly = poly
        self._constant = None

    @classmethod
    def constant(cls, value, dim: int = 1) -> "Coefficient":
        value = np.asarray(value, dtype=float)
        poly = Polynomial([float(value.ravel()[0])]) if value.size == 1 and dim == 1 else None
        c = cls(lambda x: value, dim=dim, out_shape=value.shape, poly=poly)
        c._constant = value
        return c

    @classmethod
    def polynomial(cls, coef) -> "Coefficient":
        poly = coef if isinstance(coef, Polynomial) else Polynomial(coef)
        return cls(poly, dim=1, vectorized=True, poly=poly)

    @property
    def is_constant(self) -> bool:
        return self._constant is not None

    @property
    def constant_value(self) -> np.ndarray:
        return self._constant

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1, self.dim)
        m = x.shape[0]
        if self._constant is not None:
            return np.broadcast_to(self._constant, (m,) + self.out_shape).copy()
        if self.vectorized:
            arg = x[:, 0] if self.dim == 1 else x
            out = np.asarray(self.fn(arg), dtype=float)
            if out.size != m * int(np.prod(self.out_shape, dtype=int)):
                # e.g. a vectorised expression that does not depend on x
                out = np.broadcast_to(out, (m,) + self.out_shape)
            return np.reshape(out, (m,) + self.out_shape)
        vals = [self.fn(float(row[0]) if self.dim == 1 else row) for row in x]
        return np.asarray(vals, dtype=float).reshape((m,) + self.out_shape)

    def at(self, x) -> np.ndarray:
        """Value at a single point."""
        return self(x)[0]

    def __repr__(self):
        kind = "constant" if self.is_constant else ("poly" if self.poly is not None else "callable")
        return f"Coefficient({kind}, dim={self.dim}, out_shape={self.out_shape})"


def as_coefficient(obj, dim: int = 1, out_shape: Sequence[int] = (),
                   vectorized: bool = False) -> Coefficient:
    """Coerce constants, polynomials and callables into a :class:`Coefficient`.

    ``vectorized`` applies to plain callables only.
    """
    out_shape = tuple(out_shape)
    if isinstance(obj, Coefficient):
        if obj.dim != dim:
            raise InputError(f"coefficient has dimension {obj.dim}, expected {dim}")
        if obj.out_shape != out_shape:
            if int(np.prod(obj.out_shape, dtype=int)) != int(np.prod(out_shape, dtype=int)):
                raise InputError(f"coefficient has shape {obj.out_shape}, expected {out_shape}")
            # same size, e.g. a scalar used as a 1x1 matrix
            c = copy.copy(obj)
            c.out_shape = out_shape
            if c._constant is not None:
                c._constant = c._constant.reshape(out_shape)
            return c
        return obj
    if isinstance(obj, Polynomial):
        if dim != 1 or out_shape not in ((), (1,), (1, 1)):
            raise InputError("polynomial coefficients are only supported for d = n = 1")
        c = Coefficient.polynomial(obj)
        c.out_shape = out_shape
        return c
    if callable(obj):
        return Coefficient(obj, dim=dim, out_shape=out_shape, vectorized=vectorized)
    value = np.asarray(obj, dtype=float)
    if value.size == int(np.prod(out_shape, dtype=int)):
        value = value.reshape(out_shape)
    elif value.ndim == 0:
        value = np.full(out_shape, float(value))
    else:
        raise InputError(f"constant of shape {value.shape} does not fit {out_shape}")
    return Coefficient.constant(value, dim=dim)
