"""Euler–Maruyama simulation of Lévy-driven SDEs

    dX = (-a X + beta(X)) dt + Phi(X-) dL + b dZ

used to estimate the probabilistic symbol through its small-time limit and
to draw empirical stationary samples.

Paths are simulated in fixed blocks of :data:`BLOCK` paths; each block owns
a Philox generator keyed by ``(seed, block index)``, so results do not
depend on the number of worker threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .coef import Coefficient, as_coefficient
from .criterion import resolve_threads
from .errors import InputError, SimulationError
from .levy import Atoms, DensityOnAnnulus, LevyTriplet, StableSymmetric, cutoff, levy_exponent
from .measure import Samples
from .symbol import Symbol, SymbolForm

BLOCK = 8192
#: Steps per unit of the symbol-estimation horizon.
ESTIMATE_SUBSTEPS = 64


@dataclass(frozen=True)
class SDESpec:
    """Coefficients of ``dX = (-a X + beta(X)) dt + Phi(X-) dL + b dZ``.

    ``phi`` maps R^d to d x n matrices, ``beta`` maps R^d to R^d; both accept
    anything :func:`symcrit.coef.as_coefficient` understands.
    """

    a: float = 0.0
    phi: object = 1.0
    driver: LevyTriplet = field(default_factory=lambda: LevyTriplet.zero(1))
    b: float = 0.0
    driver_z: Optional[LevyTriplet] = None
    beta: object = None
    dim: int = 1

    def __post_init__(self):
        n = self.driver.dim
        object.__setattr__(self, "phi", as_coefficient(self.phi, self.dim, (self.dim, n)))
        if self.beta is not None:
            object.__setattr__(self, "beta", as_coefficient(self.beta, self.dim, (self.dim,)))
        if self.driver_z is not None and self.driver_z.dim != self.dim:
            raise InputError("the additive driver Z must have the state dimension")

    @classmethod
    def ou(cls, lam: float, sigma: float) -> "SDESpec":
        """``dX = -lam X dt + sigma dW``."""
        return cls(a=lam, phi=sigma, driver=LevyTriplet.brownian(1.0))

    @classmethod
    def stable_noise(cls, a1: float, a2: float, alpha: float, beta, dim: int = 1) -> "SDESpec":
        """``dX = sqrt(2 a1) dW + beta(X) dt + a2 dZ`` with unnormalised ``nu_alpha`` jumps.

        Its symbol is :func:`symcrit.symbol.symbol_stable_noise` with weight
        ``a2^alpha`` in place of ``a2``.
        """
        from .levy import stable_constant
        z = LevyTriplet(np.zeros(dim), np.zeros((dim, dim)),
                        StableSymmetric(alpha, -stable_constant(alpha, dim), dim))
        return cls(a=0.0, phi=math.sqrt(2 * a1) * np.eye(dim), driver=LevyTriplet.brownian(1.0, dim),
                   b=a2, driver_z=z, beta=beta, dim=dim)

    def symbol(self) -> Symbol:
        """Canonical symbol ``psi_L(Phi'xi) + i a x'xi - i beta(x)'xi + psi_Z(b xi)``."""

        def fn(x, xi):
            u = np.einsum("mij,i->mj", self.phi(x), xi)
            out = levy_exponent(self.driver, u) + 1j * self.a * (x @ xi)
            if self.beta is not None:
                out = out - 1j * (self.beta(x) @ xi)
            if self.driver_z is not None:
                out = out + levy_exponent(self.driver_z, self.b * xi)
            return out

        return Symbol(fn, SymbolForm.CUSTOM, self.dim, notes=tuple(self.notes()))

    def notes(self) -> list:
        out = []
        for drv in (self.driver, self.driver_z):
            if drv is None:
                continue
            if isinstance(drv.jumps, StableSymmetric) and drv.jumps.alpha <= 1 and self.a != 0:
                out.append("stable driver with alpha <= 1 and linear drift: E|L_1| is infinite, "
                           "outside the hypotheses of the Levy-driven necessity result")
            if isinstance(drv.jumps, DensityOnAnnulus) and drv.jumps.small_jump_variance > 0:
                out.append("jumps below eps are replaced by a Gaussian with matched variance")
        return out


class SymbolEstimate(NamedTuple):
    value: complex
    std_error: float
    t_used: float
    n_paths: int
    notes: tuple = ()


class Path(NamedTuple):
    times: np.ndarray
    states: np.ndarray


# ---------------------------------------------------------------------------
# random variates

def symmetric_stable(alpha: float, size, rng: np.random.Generator) -> np.ndarray:
    """Chambers–Mallows–Stuck draw with characteristic function ``exp(-|u|^alpha)``."""
    v = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size)
    w = rng.standard_exponential(size)
    if alpha == 1.0:
        return np.tan(v)
    return (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))


def positive_stable(alpha: float, size, rng: np.random.Generator) -> np.ndarray:
    """Kanter's draw of ``A > 0`` with ``E exp(-s A) = exp(-s^alpha)``, 0 < alpha < 1."""
    u = rng.uniform(0.0, 1.0, size)
    w = rng.standard_exponential(size)
    pu = math.pi * u
    zolotarev = (np.sin(alpha * pu) ** (alpha / (1 - alpha)) * np.sin((1 - alpha) * pu)
                 / np.sin(pu) ** (1 / (1 - alpha)))
    return (zolotarev / w) ** ((1 - alpha) / alpha)


def rotational_stable(alpha: float, dim: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """``(m, dim)`` draws with characteristic function ``exp(-|u|^alpha)``."""
    if dim == 1:
        return symmetric_stable(alpha, m, rng).reshape(m, 1)
    # sub-Gaussian: sqrt(A) * N(0, 2I) with A positive alpha/2-stable
    a = positive_stable(alpha / 2, m, rng)
    return np.sqrt(2 * a)[:, None] * rng.standard_normal((m, dim))


class _JumpSampler:
    """Finite-activity jumps: total rate plus an inverse-CDF mark sampler."""

    def __init__(self, jumps):
        if isinstance(jumps, Atoms):
            self.rate = jumps.total_mass
            self._cum = np.cumsum(jumps.masses) / self.rate
            self._locs = jumps.locations
            self.compensator = (jumps.masses * cutoff(jumps.locations)) @ jumps.locations
            self._table = None
        else:
            self.rate = jumps.total_mass
            self.compensator = np.array([jumps.compensator_drift()])
            ys = []
            for a, b in jumps._pieces():
                ys.append(np.linspace(a, b, 2049))
            y = np.concatenate(ys)
            dens = np.array([jumps.density(v) for v in y])
            # per-piece trapezoid masses, concatenated into one CDF table
            cells, marks = [], []
            for k in range(len(ys)):
                yy, dd = ys[k], dens[k * 2049:(k + 1) * 2049]
                cells.append(0.5 * (dd[1:] + dd[:-1]) * np.diff(yy))
                marks.append(np.column_stack([yy[:-1], yy[1:]]))
            cells = np.concatenate(cells)
            self._cells = np.concatenate(marks)
            self._cum = np.cumsum(cells) / cells.sum()
            self._table = True

    def marks(self, k: int, rng: np.random.Generator) -> np.ndarray:
        idx = np.searchsorted(self._cum, rng.uniform(0, 1, k), side="right")
        idx = np.minimum(idx, self._cum.size - 1)
        if self._table is None:
            return self._locs[idx]
        lo, hi = self._cells[idx, 0], self._cells[idx, 1]
        return (lo + (hi - lo) * rng.uniform(0, 1, k)).reshape(k, 1)


class _Driver:
    """Per-step increments of one Lévy driver."""

    def __init__(self, triplet: LevyTriplet):
        self.triplet = triplet
        self.n = triplet.dim
        q = triplet.effective_gaussian()
        w, v = np.linalg.eigh(q)
        self.root = v * np.sqrt(np.clip(w, 0, None))
        self.gaussian = bool(np.any(w > 0))
        jumps = triplet.jumps
        self.stable = jumps if isinstance(jumps, StableSymmetric) else None
        self.cp = _JumpSampler(jumps) if isinstance(jumps, (Atoms, DensityOnAnnulus)) else None
        self.drift = triplet.drift - (self.cp.compensator if self.cp is not None else 0.0)

    def continuous(self, m: int, dt: float, rng: np.random.Generator) -> np.ndarray:
        out = np.broadcast_to(self.drift * dt, (m, self.n)).copy()
        if self.gaussian:
            out += math.sqrt(dt) * rng.standard_normal((m, self.n)) @ self.root.T
        if self.stable is not None:
            s = (self.stable.scale * dt) ** (1.0 / self.stable.alpha)
            out += s * rotational_stable(self.stable.alpha, self.n, m, rng)
        return out


def _euler_block(spec: SDESpec, x: np.ndarray, n_steps: int, dt: float, rng: np.random.Generator,
                 record_every: int = 0, record_from: int = 0, step0: int = 0):
    """Advance the (m, d) state ``x`` in place; optionally record snapshots."""
    drv_l = _Driver(spec.driver)
    drv_z = _Driver(spec.driver_z) if spec.driver_z is not None else None
    phi_const = spec.phi.constant_value if spec.phi.is_constant else None
    m = x.shape[0]
    snaps = []
    # overflow is reported below as a SimulationError
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_steps):
            drift = -spec.a * x
            if spec.beta is not None:
                drift = drift + spec.beta(x)
            dl = drv_l.continuous(m, dt, rng)
            if phi_const is not None:
                noise = dl @ phi_const.T
            else:
                noise = np.einsum("mij,mj->mi", spec.phi(x), dl)
            x_new = x + drift * dt + noise
            if drv_z is not None:
                x_new += spec.b * drv_z.continuous(m, dt, rng)
            for drv, scale in ((drv_l, None), (drv_z, spec.b)):
                if drv is None or drv.cp is None:
                    continue
                counts = rng.poisson(drv.cp.rate * dt, m)
                for j in range(int(counts.max(initial=0))):
                    idx = np.flatnonzero(counts > j)
                    y = drv.cp.marks(idx.size, rng)
                    if scale is None:
                        x_new[idx] += np.einsum("mij,mj->mi", spec.phi(x_new[idx]), y)
                    else:
                        x_new[idx] += scale * y
            if not np.all(np.isfinite(x_new)):
                raise SimulationError("state became non-finite", step=step0 + k + 1)
            x = x_new
            if record_every and (k + 1) >= record_from and (k + 1 - record_from) % record_every == 0:
                snaps.append(x.copy())
    return x, snaps


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(block)])))


def _check_start(spec: SDESpec, x0) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size != spec.dim:
        raise InputError(f"start point has dimension {x0.size}, SDE {spec.dim}")
    return x0


def simulate_path(spec: SDESpec, x0, t_end: float, dt: float, seed: int = 42) -> Path:
    """One Euler–Maruyama path on ``[0, t_end]``; reproducible given ``seed``."""
    if not dt > 0 or not t_end >= dt:
        raise InputError("need dt > 0 and t_end >= dt")
    x0 = _check_start(spec, x0)
    n = int(round(t_end / dt))
    _, snaps = _euler_block(spec, x0.reshape(1, -1).copy(), n, dt, _block_rng(seed, 0), record_every=1)
    states = np.vstack([x0.reshape(1, -1)] + [s for s in snaps])
    return Path(np.arange(n + 1) * dt, states)


def _map_blocks(fn, sizes, threads):
    n = resolve_threads(threads)
    if n == 1 or len(sizes) == 1:
        return [fn(i, s) for i, s in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))


def _block_sizes(total: int) -> list:
    full, rest = divmod(total, BLOCK)
    return [BLOCK] * full + ([rest] if rest else [])


def estimate_symbol(spec: SDESpec, x, xi, t: float, n_paths: int = 100_000, seed: int = 42,
                    dt: Optional[float] = None, threads: Optional[int] = None) -> SymbolEstimate:
    """Monte Carlo ``lambda_xi(x, t) = -(E^x e^{i(X_t - x)'xi} - 1) / t``.

    Tends to ``p(x, xi)`` as ``t -> 0``; the default step is ``t / 64``.
    """
    if not t > 0:
        raise InputError("t must be positive")
    if n_paths < 100:
        raise InputError("n_paths must be at least 100")
    x = _check_start(spec, x)
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.size != spec.dim:
        raise InputError("frequency dimension does not match the SDE")
    dt = t / ESTIMATE_SUBSTEPS if dt is None else dt
    n_steps = max(1, int(round(t / dt)))
    dt = t / n_steps

    def block(i, m):
        rng = _block_rng(seed, i)
        xt, _ = _euler_block(spec, np.tile(x, (m, 1)), n_steps, dt, rng)
        z = np.exp(1j * ((xt - x) @ xi))
        return z.sum(), np.sum(np.abs(z) ** 2), m

    parts = _map_blocks(block, _block_sizes(n_paths), threads)
    n = sum(p[2] for p in parts)
    mean = complex(math.fsum(p[0].real for p in parts), math.fsum(p[0].imag for p in parts)) / n
    second = math.fsum(p[1] for p in parts) / n
    var = max(second - abs(mean) ** 2, 0.0) * n / max(n - 1, 1)
    value = -(mean - 1.0) / t
    return SymbolEstimate(complex(value), math.sqrt(var / n) / t, t, n, tuple(spec.notes()))


def empirical_law(spec: SDESpec, x0, burn_in: float, n_samples: int, sample_gap: float,
                  dt: float, seed: int = 42, n_chains: Optional[int] = None,
                  threads: Optional[int] = None) -> Samples:
    """Thinned post-burn-in states of independent chains, as a :class:`Samples` measure.

    Each chain starts at ``x0``, runs for ``burn_in`` and then contributes
    one state every ``sample_gap``.
    """
    if not (burn_in > 0 and sample_gap > 0 and dt > 0):
        raise InputError("burn_in, sample_gap and dt must be positive")
    if n_samples < 1:
        raise InputError("n_samples must be positive")
    x0 = _check_start(spec, x0)
    chains = min(n_samples, 1000) if n_chains is None else int(n_chains)
    per_chain = math.ceil(n_samples / chains)
    burn_steps = max(1, int(round(burn_in / dt)))
    gap_steps = max(1, int(round(sample_gap / dt)))
    total = burn_steps + gap_steps * (per_chain - 1)

    def block(i, m):
        rng = _block_rng(seed, i)
        _, snaps = _euler_block(spec, np.tile(x0, (m, 1)), total, dt, rng,
                                record_every=gap_steps, record_from=burn_steps)
        return np.stack(snaps, axis=0)              # (per_chain, m, d)

    parts = _map_blocks(block, _block_sizes(chains), threads)
    pts = np.concatenate(parts, axis=1).reshape(-1, spec.dim)
    return Samples(pts[:n_samples])
