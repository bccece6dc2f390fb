"""Limit laws of the scaled trend statistics.

The univariate law has a closed-form series expansion; for more than one
trend the law is the spectrum of the inverse Gram matrix of a standard
Brownian motion and is simulated.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from cotrend.errors import DomainError, SingularGramError

MAX_TERMS = 500
TERM_TOL = 1e-14
# Below this point the alternating series cancels to rounding noise. The
# small-z branch writes F(z) = P(int B^2 > 1/z) with Smirnov's integral over
# the gaps between the Karhunen-Loeve eigenvalues, which has no cancellation.
Z_SWITCH = 0.2
SMIRNOV_TERMS = 2
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
QUANTILE_BRACKET = (1e-6, 1e5)

DEFAULT_GRID = 2000
DEFAULT_REPS = 100_000
CHUNK = 200
MAX_RETRIES = 10
GRAM_COND_CAP = 1e12


def _binomial_minus_half(n: int) -> np.ndarray:
    eta = np.empty(n)
    eta[0] = 1.0
    for j in range(1, n):
        eta[j] = eta[j - 1] * (0.5 - j) / j
    return eta


_ETA = _binomial_minus_half(MAX_TERMS)
_A = 2.0 * np.arange(MAX_TERMS) + 0.5


def _truncated_sum(terms: np.ndarray) -> np.ndarray:
    """Sum terms along axis 0, stopping before the first term below TERM_TOL.

    The leading term is always kept.
    """
    keep = np.cumprod(np.abs(terms[1:]) >= TERM_TOL, axis=0).astype(bool)
    return terms[0] + np.where(keep, terms[1:], 0.0).sum(axis=0)


def _smirnov_tail(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(F(z), f(z))`` for small ``z > 0`` via ``P(int B^2 > x)``, ``x = 1/z``.

    The k-th term integrates ``exp(-u x / 2) / (u sqrt|cos sqrt u|)`` over
    ``u`` between consecutive odd/even eigenvalue reciprocals. With
    ``u = v^2`` and ``v = a + (b - a)(1 - cos t) / 2`` the endpoint
    singularities disappear and Gauss-Legendre in ``t`` is accurate.
    """
    # below 1e-3 every term is exp(-x pi^2 / 8) with x > 1000: exactly 0.0
    F = np.zeros(z.size)
    dens = np.zeros(z.size)
    live = z >= 1e-3
    if live.any():
        F[live], dens[live] = _smirnov_terms(1.0 / z[live])
    return F, dens


def _smirnov_terms(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = x[:, None]
    t = (_GL_NODES + 1.0) * math.pi / 2
    w = _GL_WEIGHTS * math.pi / 2
    F = np.zeros(x.shape[0])
    dens = np.zeros(x.shape[0])
    for k in range(1, SMIRNOV_TERMS + 1):
        a, b = (2 * k - 1.5) * math.pi, (2 * k - 0.5) * math.pi
        v = a + (b - a) * (1.0 - np.cos(t)) / 2
        root = np.sqrt((v - a) * (b - v) / np.abs(np.cos(v)))
        e = np.exp(-0.5 * v * v * x) * root
        sign = (-1) ** (k + 1) / math.pi
        F += sign * (e * (2.0 / v)) @ w
        dens += sign * (e * v) @ w
    # density of 1/y at z is f_y(1/z) / z^2; written to avoid z^2 underflow
    dens = np.where(dens > 0, dens * x[:, 0] * x[:, 0], 0.0)
    return np.maximum(F, 0.0), np.maximum(dens, 0.0)


def _as_array(z):
    arr = np.asarray(z, dtype=float)
    return arr, arr.ndim == 0


def zeta1_pdf(z):
    """Density of the univariate limit law at ``z > 0``."""
    arr, scalar = _as_array(z)
    if np.any(~(arr > 0)):
        raise DomainError("zeta1_pdf is defined for z > 0")
    flat = arr.ravel()
    out = np.zeros_like(flat)
    live = flat >= Z_SWITCH
    if live.any():
        zl = flat[live]
        terms = (_ETA * _A)[:, None] * np.exp(-0.5 * (_A**2)[:, None] * zl)
        out[live] = _truncated_sum(terms) / np.sqrt(np.pi * zl)
    if (~live).any():
        out[~live] = _smirnov_tail(flat[~live])[1]
    out = np.maximum(out, 0.0).reshape(arr.shape)
    return float(out) if scalar else out


def zeta1_sf(z):
    """Survival function ``1 - F(z)``, accurate in the upper tail."""
    arr, scalar = _as_array(z)
    if np.any(~(arr >= 0)):
        raise DomainError("zeta1_sf is defined for z >= 0")
    flat = arr.ravel()
    out = np.ones_like(flat)
    live = flat >= Z_SWITCH
    if live.any():
        zl = flat[live]
        # Gamma(1/2, x) = sqrt(pi) erfc(sqrt(x))
        terms = _ETA[:, None] * erfc(_A[:, None] * np.sqrt(zl / 2.0))
        out[live] = math.sqrt(2.0) * _truncated_sum(terms)
    small = (~live) & (flat > 0)
    if small.any():
        out[small] = 1.0 - _smirnov_tail(flat[small])[0]
    out = np.clip(out, 0.0, 1.0).reshape(arr.shape)
    return float(out) if scalar else out


def zeta1_cdf(z):
    """Distribution function of the univariate limit law; ``F(0) = 0``."""
    arr, scalar = _as_array(z)
    if np.any(~(arr >= 0)):
        raise DomainError("zeta1_cdf is defined for z >= 0")
    flat = arr.ravel()
    out = np.zeros_like(flat)
    live = flat >= Z_SWITCH
    if live.any():
        out[live] = 1.0 - np.asarray(zeta1_sf(flat[live]))
    small = (~live) & (flat > 0)
    if small.any():
        out[small] = _smirnov_tail(flat[small])[0]
    out = np.clip(out, 0.0, 1.0).reshape(arr.shape)
    return float(out) if scalar else out


def zeta1_quantile(prob: float, xtol: float = 1e-8) -> float:
    """Invert :func:`zeta1_cdf` by bisection on a fixed bracket."""
    if not 0.0 < prob < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {prob!r}")
    lo, hi = QUANTILE_BRACKET
    if zeta1_cdf(lo) >= prob:
        return lo
    if zeta1_cdf(hi) <= prob:
        return hi
    # run to float resolution; xtol is only a floor on the bracket width
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if zeta1_cdf(mid) < prob:
            lo = mid
        else:
            hi = mid
        if hi - lo <= min(xtol, 4 * np.spacing(hi)):
            break
    return 0.5 * (lo + hi)


def zeta1_mean() -> float:
    """Mean of the univariate limit law, ``sqrt(2) sum_j eta_j / a_j^2``."""
    terms = _ETA / _A**2
    return math.sqrt(2.0) * float(_truncated_sum(terms[:, None])[0])


@dataclass(frozen=True, eq=False)
class ZetaDraws:
    """Simulated spectra of the inverse Brownian Gram matrix.

    ``values[r]`` holds the eigenvalues of replication ``r`` in descending
    order.
    """

    dim: int
    reps: int
    grid: int
    seed: int
    values: np.ndarray
    retries: int = 0


def _coordinate_normals(seed, chunk, coord, n, grid, attempt=0):
    key = (chunk, coord) if attempt == 0 else (chunk, coord, attempt)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))
    return rng.standard_normal((n, grid))


def _gram(Z: np.ndarray) -> np.ndarray:
    # Z: (n, dim, grid) increments; Brownian path at u = 1/grid, ..., 1
    grid = Z.shape[-1]
    B = np.cumsum(Z, axis=-1) / math.sqrt(grid)
    return B @ B.transpose(0, 2, 1) / grid


def _singular(gram: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvalsh(gram)
    return ~(ev[:, 0] > ev[:, -1] / GRAM_COND_CAP)


def _simulate_chunk(args):
    chunk, n, dims, grid, seed = args
    maxdim = max(dims)
    Z = np.stack(
        [_coordinate_normals(seed, chunk, k, n, grid) for k in range(maxdim)], axis=1
    )
    gram = _gram(Z)
    retries = 0
    bad = np.flatnonzero(_singular(gram))
    attempt = 0
    while bad.size:
        attempt += 1
        if attempt > MAX_RETRIES:
            raise SingularGramError(
                f"{MAX_RETRIES} consecutive singular Gram matrices "
                f"(dim={maxdim}, grid={grid})"
            )
        retries += bad.size
        fresh = np.stack(
            [_coordinate_normals(seed, chunk, k, n, grid, attempt)[bad] for k in range(maxdim)],
            axis=1,
        )
        gram[bad] = _gram(fresh)
        bad = bad[_singular(gram[bad])]
    out = {}
    for d in dims:
        ev = np.linalg.eigvalsh(gram[:, :d, :d])
        # ascending eigenvalues of the Gram matrix -> descending of its inverse
        out[d] = 1.0 / ev
    return out, retries


def _chunks(reps):
    return [(c, min(CHUNK, reps - c * CHUNK)) for c in range(-(-reps // CHUNK))]


def simulate_zeta_nested(
    dims, reps: int, grid: int = DEFAULT_GRID, seed: int = 0, workers: int = 1
) -> dict[int, ZetaDraws]:
    """Simulate the limit spectra for several dimensions from shared paths.

    Coordinate ``k`` of every Brownian path is drawn from its own seeded
    stream, so the draws for dimension ``d`` do not depend on which other
    dimensions are requested, on ``workers``, or on how ``reps`` is chunked.
    """
    dims = sorted({int(d) for d in dims})
    if not dims or dims[0] < 1:
        raise DomainError(f"dimensions must be positive integers, got {dims}")
    if reps < 1:
        raise DomainError(f"reps must be positive, got {reps}")
    if grid < 100:
        raise DomainError(f"grid must be at least 100, got {grid}")
    tasks = [(c, n, dims, grid, seed) for c, n in _chunks(reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_simulate_chunk, tasks))
    else:
        results = [_simulate_chunk(t) for t in tasks]
    retries = sum(r for _, r in results)
    return {
        d: ZetaDraws(d, reps, grid, seed, np.concatenate([res[d] for res, _ in results]), retries)
        for d in dims
    }


def simulate_zeta(
    dim: int, reps: int, grid: int = DEFAULT_GRID, seed: int = 0, workers: int = 1
) -> ZetaDraws:
    """Simulate ``reps`` draws of the descending spectrum of ``(int B B')^-1``.

    ``B`` is a ``dim``-dimensional standard Brownian motion approximated by
    scaled partial sums of standard normals on ``grid`` equispaced steps.
    """
    return simulate_zeta_nested([dim], reps, grid, seed, workers)[dim]


@dataclass(frozen=True)
class Stripe:
    """Pointwise intervals for the log of each ordered limit eigenvalue."""

    coverage: float
    lower: np.ndarray
    upper: np.ndarray
    mean: np.ndarray
    pointwise: bool = True

    def contains(self, log_values) -> np.ndarray:
        v = np.asarray(log_values, dtype=float)
        return (v >= self.lower) & (v <= self.upper)


def confidence_stripe(dim: int, coverage: float, draws: ZetaDraws) -> Stripe:
    """Equal-tailed intervals of ``log zeta_j``, j = 1..dim, and their means.

    Coverage holds coordinate by coordinate, not simultaneously.
    """
    if draws.dim != dim:
        raise DomainError(f"draws have dim={draws.dim}, requested dim={dim}")
    if not 0.0 < coverage < 1.0:
        raise DomainError(f"coverage must lie in (0, 1), got {coverage!r}")
    if draws.reps < 1000:
        raise DomainError(f"stripe needs at least 1000 draws, got {draws.reps}")
    logs = np.log(draws.values)
    lo, hi = np.quantile(logs, [(1 - coverage) / 2, (1 + coverage) / 2], axis=0)
    return Stripe(coverage, lo, hi, logs.mean(axis=0))
