"""The invariance criterion ``S(xi) = int e^{i x'xi} p(x, xi) mu(dx)``.

An invariant law makes ``S`` vanish identically; a nonzero residual at any
frequency rejects the candidate.  Conversely ``S = 0`` only certifies
infinitesimal invariance, which is why a passing report is labelled
"consistent with invariance" and never "invariant".
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .coef import as_coefficient
from .errors import InputError, SymcritError, UnsupportedDimension
from .levy import LevyTriplet, levy_exponent, stable_constant
from .measure import Density, GaussianParam, Measure, TransformValue, char_fn, weighted_transform
from .symbol import Symbol

DEFAULT_TOL = 1e-6
#: Width of the acceptance band in units of the per-point error estimate.
ERROR_BAND = 3.0

PASS_WORDING = ("criterion satisfied on the grid: consistent with (infinitesimal) invariance; "
                "this is not a proof that the measure is invariant")
FAIL_WORDING = "criterion violated: the measure is not invariant for this process"

STANDARD_NOTES = (
    "the criterion holds for Lebesgue-almost all xi in general; a finite grid cannot detect null sets",
    "necessity assumes int |p(x, xi)| mu(dx) < infinity and the analytic hypotheses "
    "(fine continuity, boundedness of coefficients) of the process class",
)


class Verdict(enum.Enum):
    CONSISTENT = "ConsistentWithInvariance"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"

    @property
    def exit_code(self) -> int:
        return {Verdict.CONSISTENT: 0, Verdict.VIOLATED: 2, Verdict.INCONCLUSIVE: 3}[self]


def default_grid(n: int = 101, lo: float = -5.0, hi: float = 5.0) -> np.ndarray:
    return np.linspace(lo, hi, n)


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get("SYMCRIT_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


@dataclass
class CriterionReport:
    grid: np.ndarray
    residuals: np.ndarray
    errors: np.ndarray
    tolerance_used: float
    hypothesis_notes: list = field(default_factory=list)

    @property
    def abs_residuals(self) -> np.ndarray:
        return np.abs(self.residuals)

    @property
    def max_abs(self) -> float:
        a = self.abs_residuals
        return float(np.nanmax(a)) if np.any(np.isfinite(a)) else math.nan

    @property
    def argmax(self) -> np.ndarray:
        return self.grid[int(np.nanargmax(self.abs_residuals))]

    @property
    def l2_norm(self) -> float:
        """Grid-weighted L2 norm (rectangle rule with the mean grid spacing)."""
        a = self.abs_residuals
        ok = np.isfinite(a)
        if self.grid.shape[0] > 1 and self.grid.shape[1] == 1:
            w = (self.grid[-1, 0] - self.grid[0, 0]) / (self.grid.shape[0] - 1)
        else:
            w = 1.0 / self.grid.shape[0]
        return float(math.sqrt(abs(w) * np.sum(a[ok] ** 2)))

    @property
    def verdict(self) -> Verdict:
        return classify(self.abs_residuals, self.errors, self.tolerance_used)

    def summary(self) -> str:
        v = self.verdict
        wording = {Verdict.CONSISTENT: PASS_WORDING, Verdict.VIOLATED: FAIL_WORDING,
                   Verdict.INCONCLUSIVE: "some grid points could not be evaluated"}[v]
        lines = [
            f"verdict: {v.value}",
            f"  {wording}",
            f"  grid points: {self.grid.shape[0]}",
            f"  max |S|: {self.max_abs:.6e} at xi = {np.array2string(self.argmax, precision=4)}",
            f"  L2 norm: {self.l2_norm:.6e}",
            f"  tolerance: {self.tolerance_used:.3e} (+ {ERROR_BAND:g} x error estimate)",
        ]
        return "\n".join(lines)


def classify(abs_s, errors, tol: float) -> Verdict:
    """Verdict from per-point magnitudes and error estimates.

    Violated if any finite point exceeds ``tol + 3 err``; consistent if every
    point lies inside its band; inconclusive if some point failed to evaluate
    (non-finite value or error) and none is violated.
    """
    abs_s = np.asarray(abs_s, dtype=float)
    errors = np.asarray(errors, dtype=float)
    finite = np.isfinite(abs_s) & np.isfinite(errors)
    band = tol + ERROR_BAND * np.where(finite, errors, 0.0)
    if np.any(finite & (abs_s > band)):
        return Verdict.VIOLATED
    if np.all(finite):
        return Verdict.CONSISTENT
    return Verdict.INCONCLUSIVE


def _weight(sym: Symbol, xi: np.ndarray):
    poly = sym.x_polynomial(xi)
    if poly is not None:
        return poly
    return lambda x: sym.batch(x, xi)


def residual(sym: Symbol, mu: Measure, xi, *, method: str = "auto", **quad) -> TransformValue:
    """``S(xi) = int e^{i x'xi} p(x, xi) mu(dx)`` with an error estimate."""
    if sym.dim != mu.dim:
        raise InputError(f"symbol dimension {sym.dim} differs from measure dimension {mu.dim}")
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.size != sym.dim:
        raise InputError(f"frequency has dimension {xi.size}, symbol {sym.dim}")
    if not np.any(xi):
        return TransformValue(0j, 0.0)
    return weighted_transform(mu, _weight(sym, xi), xi, method=method, **quad)


def _grid_array(grid, dim: int) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    g = g.reshape(-1, 1) if g.ndim <= 1 and dim == 1 else g.reshape(-1, dim)
    if g.shape[0] == 0:
        raise InputError("frequency grid must be nonempty")
    return g


def residual_profile(sym: Symbol, mu: Measure, grid=None, *, tol: float = DEFAULT_TOL,
                     threads: Optional[int] = None, method: str = "auto",
                     notes: Sequence[str] = (), **quad) -> CriterionReport:
    """Evaluate ``S`` on every grid point; failed points become NaN (inconclusive)."""
    if not tol > 0:
        raise InputError("tolerance must be positive")
    grid = _grid_array(default_grid() if grid is None else grid, sym.dim)

    def one(xi):
        try:
            r = residual(sym, mu, xi, method=method, **quad)
            return complex(r.value), float(r.error), None
        except SymcritError as exc:
            return complex(math.nan, math.nan), math.inf, f"xi={xi.tolist()}: {exc}"

    n = resolve_threads(threads)
    if n == 1:
        results = [one(xi) for xi in grid]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(one, grid))     # map keeps grid order
    res = np.array([r[0] for r in results], dtype=complex)
    err = np.array([r[1] for r in results], dtype=float)
    failures = [r[2] for r in results if r[2]]
    all_notes = list(STANDARD_NOTES) + list(sym.notes) + list(notes) + failures
    return CriterionReport(grid, res, err, tol, all_notes)


def check_invariance(sym: Symbol, mu: Measure, grid=None, tol: float = DEFAULT_TOL, **kwargs) -> Verdict:
    """Verdict of :func:`residual_profile`; a pass means infinitesimal invariance only."""
    return residual_profile(sym, mu, grid, tol=tol, **kwargs).verdict


def gou_relation_residual(driver_u: LevyTriplet, driver_l: LevyTriplet, mu: Measure, xi: float,
                          **kwargs) -> TransformValue:
    """``int e^{ix xi} psi_U(x xi) mu(dx) + psi_L(xi) phi_mu(xi)`` (zero for invariant mu)."""
    if driver_u.dim != 1 or driver_l.dim != 1 or mu.dim != 1:
        raise UnsupportedDimension("the generalised OU relation is scalar")
    xi = float(np.asarray(xi, dtype=float).reshape(-1)[0])
    if xi == 0.0:
        return TransformValue(0j, 0.0)
    if driver_u.is_gaussian:
        inner = Polynomial([0.0, xi])
        g = (-1j * driver_u.drift[0]) * inner + 0.5 * driver_u.gaussian[0, 0] * inner * inner + Polynomial([0j])
    else:
        def g(x):
            return levy_exponent(driver_u, x * xi)
    lhs = weighted_transform(mu, g, xi, **kwargs)
    psi_l = levy_exponent(driver_l, xi)
    phi = char_fn(mu, xi, **kwargs)
    return TransformValue(lhs.value + psi_l * phi.value, lhs.error + abs(psi_l) * phi.error)


def albeverio_residual(a1: float, a2: float, alpha: float, beta, rho: Measure, xi, **kwargs) -> TransformValue:
    """``(a1|xi|^2 - a2 c_alpha |xi|^alpha) rho^(xi) + i xi'(beta rho)^(xi)``.

    Hats denote ``int e^{-i x'xi} (.) dx``; the value vanishes at every xi
    when ``rho`` is invariant for the process of :func:`symbol_stable_noise`,
    i.e. ``dX = sqrt(2 a1) dW + beta(X) dt + a2^{1/alpha} dZ``.
    """
    if a1 < 0 or a2 < 0 or a1 + a2 <= 0:
        raise InputError("need a1, a2 >= 0 with a1 + a2 > 0")
    d = rho.dim
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.size != d:
        raise InputError(f"frequency has dimension {xi.size}, density {d}")
    if not np.any(xi):
        return TransformValue(0j, 0.0)
    beta = as_coefficient(beta, d, (d,))
    r = float(np.linalg.norm(xi))
    c_alpha = stable_constant(alpha, d)
    scalar = a1 * r ** 2 - a2 * c_alpha * r ** alpha

    def g(x):
        return scalar + 1j * (beta(x) @ xi)

    return weighted_transform(rho, g, -xi, **kwargs)


class FactorizingResult(NamedTuple):
    max_value: float
    compatible: bool

    @property
    def verdict(self) -> str:
        return "Compatible" if self.compatible else "Incompatible"


def factorizing_check(phi, rho, grid_x, tol: float = 1e-10) -> FactorizingResult:
    """Largest ``|Phi(x)| rho(x)`` on ``grid_x``.

    For ``dX = Phi(X-) dL`` with symmetric alpha-stable ``L``, alpha in (0, 1),
    an absolutely continuous invariant law forces ``Phi rho = 0`` a.e.
    """
    x = np.asarray(grid_x, dtype=float).reshape(-1)
    if x.size == 0:
        raise InputError("grid_x must be nonempty")
    phi = as_coefficient(phi, 1, ())
    if isinstance(rho, GaussianParam):
        dens = rho.pdf(x)
    elif isinstance(rho, Density):
        dens = rho(x)
    elif callable(rho):
        dens = np.asarray(rho(x), dtype=float)
    else:
        raise InputError("rho must be a density")
    vals = np.abs(phi(x)) * dens
    m = float(vals.max())
    return FactorizingResult(m, m <= tol)
