"""Fitting a parametric law to a symbol by driving the criterion residual to zero.

A zero objective certifies infinitesimal invariance within the family; it
says nothing about uniqueness of the invariant law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy import optimize

from .criterion import _weight, default_grid
from .errors import InputError
from .measure import Density, GaussianParam, Measure, weighted_transform
from .symbol import Symbol

SCAN_BUDGET = 25


@dataclass(frozen=True)
class MeasureFamily:
    """``build(params) -> Measure`` with box bounds ``lower <= params <= upper``.

    Components with ``lower == upper`` are held fixed.
    """

    build: Callable[[np.ndarray], Measure]
    lower: np.ndarray
    upper: np.ndarray
    names: tuple = ()

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or np.any(lo > hi) or not np.all(np.isfinite(lo) & np.isfinite(hi)):
            raise InputError("parameter box must be finite and nonempty")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)


def gaussian_family(mean=(0.0, 0.0), variance=(0.01, 10.0)) -> MeasureFamily:
    """``N(m, v)`` with ``m`` in ``mean`` and ``v`` in ``variance`` (1-d)."""
    return MeasureFamily(lambda p: GaussianParam(p[0], p[1]),
                         [mean[0], variance[0]], [mean[1], variance[1]], ("mean", "variance"))


def density_family(pdf: Callable[[np.ndarray, np.ndarray], np.ndarray], support,
                   lower, upper, names: Sequence[str] = ()) -> MeasureFamily:
    """Densities ``x -> pdf(x, params)`` on ``support``, normalised numerically."""
    return MeasureFamily(lambda p: Density(lambda x: pdf(x, p), support, normalize=True),
                         lower, upper, tuple(names))


@dataclass
class FitProblem:
    symbol: Symbol
    family: MeasureFamily
    grid: np.ndarray = field(default_factory=default_grid)
    objective: str = "SupAbs"
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float).reshape(-1, self.symbol.dim)
        if self.grid.shape[0] == 0:
            raise InputError("grid must be nonempty")
        if self.objective not in ("SupAbs", "L2"):
            raise InputError(f"objective must be SupAbs or L2, got {self.objective!r}")
        w = np.ones(self.grid.shape[0]) if self.weights is None else np.asarray(self.weights, dtype=float)
        if w.shape != (self.grid.shape[0],) or np.any(w < 0):
            raise InputError("weights must be nonnegative, one per grid point")
        self.weights = w
        # x -> p(x, xi) does not depend on the measure; build it once per grid point
        self._integrands = [None if not np.any(xi) else _weight(self.symbol, xi) for xi in self.grid]

    def value(self, params) -> float:
        """Objective at ``params`` (full parameter vector)."""
        mu = self.family.build(np.asarray(params, dtype=float))
        s = np.array([0.0 if g is None else abs(weighted_transform(mu, g, xi).value)
                      for g, xi in zip(self._integrands, self.grid)])
        if self.objective == "SupAbs":
            return float(np.max(self.weights * s))
        return float(math.sqrt(np.sum(self.weights * s ** 2)))


class FitResult(NamedTuple):
    params: np.ndarray
    objective_value: float
    iterations: int
    converged: bool


def fit_invariant(problem: FitProblem, max_iter: int = 500, tol: float = 1e-10,
                  restarts: int = 5, seed: int = 0) -> FitResult:
    """Bounded Nelder–Mead with random restarts inside the parameter box.

    The first start is the box centre, the second the best point of a coarse
    grid scan of the box, the others uniform draws from ``default_rng(seed)``.  ``converged`` means ``objective_value <= tol``;
    stagnation above ``tol`` is reported, not raised.
    """
    fam = problem.family
    free = fam.lower < fam.upper
    base = fam.lower.copy()

    def full(theta):
        p = base.copy()
        p[free] = np.clip(theta, fam.lower[free], fam.upper[free])
        return p

    def objective(theta):
        try:
            return problem.value(full(theta))
        except (InputError, ArithmeticError):
            return math.inf

    if not np.any(free):
        val = problem.value(base)
        return FitResult(base, val, 0, val <= tol)

    rng = np.random.default_rng(seed)
    lo, hi = fam.lower[free], fam.upper[free]
    starts = [0.5 * (lo + hi)]
    if restarts > 1:
        starts.append(_grid_start(objective, lo, hi))
    starts += [rng.uniform(lo, hi) for _ in range(restarts - len(starts))]
    best_x, best_f, iters = None, math.inf, 0
    for x0 in starts:
        res = optimize.minimize(objective, x0, method="Nelder-Mead", bounds=list(zip(lo, hi)),
                                options={"maxiter": max_iter, "xatol": 1e-13, "fatol": 1e-15})
        iters += int(res.nit)
        if res.fun < best_f:
            best_x, best_f = res.x, float(res.fun)
        if best_f <= tol:
            break
    return FitResult(full(best_x), best_f, iters, best_f <= tol)


def _grid_start(objective, lo, hi, budget: int = SCAN_BUDGET) -> np.ndarray:
    """Best point of a tensor grid with at most ``budget`` nodes."""
    k = max(2, int(budget ** (1.0 / lo.size)))
    axes = [np.linspace(a, b, k) for a, b in zip(lo, hi)]
    pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    vals = [objective(p) for p in pts]
    return pts[int(np.argmin(vals))]


def ou_variance_ode_solve(lam: float, sigma: float, mode: str = "canonical") -> float:
    """Variance of the Gaussian solving ``-lam xi phi' = k sigma^2 xi^2 phi``.

    ``k = 1/2`` in canonical mode (stationary variance ``sigma^2 / (2 lam)``),
    ``k = 1`` in paper mode (``sigma^2 / lam``).
    """
    if not (lam > 0 and sigma > 0):
        raise InputError("lambda and sigma must be positive")
    if mode == "canonical":
        return sigma ** 2 / (2 * lam)
    if mode == "paper":
        return sigma ** 2 / lam
    raise InputError(f"mode must be 'canonical' or 'paper', got {mode!r}")
