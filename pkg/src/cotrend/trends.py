"""Estimators of the number of common stochastic trends from CCA eigenvalues."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from cotrend.critical_values import CriticalValueTable, NormKind
from cotrend.errors import DomainError

PI2 = math.pi**2


class Method(str, enum.Enum):
    MAXGAP = "maxgap"
    ARGMAX_ALT = "argmax-alt"
    SEQ_INF = "seq-inf"
    SEQ_ONE = "seq-one"

    @property
    def sequential(self) -> bool:
        return self in (Method.SEQ_INF, Method.SEQ_ONE)

    @property
    def norm(self) -> NormKind | None:
        return {Method.SEQ_INF: NormKind.INF, Method.SEQ_ONE: NormKind.ONE}.get(self)


@dataclass(frozen=True)
class TauVector:
    i: int
    values: np.ndarray


@dataclass(frozen=True)
class TrendEstimate:
    s_hat: int
    method: Method
    diagnostics: dict = field(default_factory=dict)
    eta: float | None = None


def _check_lambdas(lambdas) -> np.ndarray:
    lam = np.asarray(lambdas, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise DomainError("eigenvalues must form a nonempty 1-d sequence")
    if np.any(lam < 0) or np.any(lam > 1):
        raise DomainError("eigenvalues must lie in [0, 1]")
    if np.any(np.diff(lam) > 1e-12):
        raise DomainError("eigenvalues must be sorted in descending order")
    return lam


def _check_order(i, p):
    if int(i) != i or not 1 <= i <= p:
        raise DomainError(f"order i={i} outside 1..{p}")


def tau(lambdas, i: int) -> TauVector:
    """``(1 - lambda_i, 1 - lambda_{i-1}, ..., 1 - lambda_1)``."""
    lam = _check_lambdas(lambdas)
    _check_order(i, lam.size)
    return TauVector(int(i), 1.0 - lam[:i][::-1])


def test_statistic(lambdas, i: int, K: int, norm) -> float:
    """``K pi^2 ||tau^(i)||_h`` for h = 1 (sum) or h = inf (1 - lambda_i)."""
    if K < 1:
        raise DomainError(f"K must be positive, got {K}")
    t = tau(lambdas, i).values
    return K * PI2 * float(t.sum() if NormKind(norm) is NormKind.ONE else t.max())


def test_statistics(lambdas, K: int, norm) -> np.ndarray:
    """Statistics for every order i = 1..p."""
    lam = _check_lambdas(lambdas)
    one_minus = 1.0 - lam
    if NormKind(norm) is NormKind.ONE:
        return K * PI2 * np.cumsum(one_minus)
    return K * PI2 * one_minus


def estimate_s_maxgap(lambdas) -> TrendEstimate:
    """Index of the largest gap in ``1, lambda_1, ..., lambda_p, 0``."""
    lam = _check_lambdas(lambdas)
    padded = np.concatenate(([1.0], lam, [0.0]))
    gaps = padded[:-1] - padded[1:]
    # argmax returns the first maximiser: ties go to the smaller count
    return TrendEstimate(int(np.argmax(gaps)), Method.MAXGAP, {"gaps": gaps.tolist()})


def argmax_alt_scores(lambdas, T: int, K: int) -> np.ndarray:
    """Log criterion ``sum_{h<=i} log l_h - sum_{h>i} log(T/K l_h)``, i = 0..p.

    Eigenvalues are floored at the smallest positive double so that exact
    zeros give finite (very negative) logs instead of undefined differences.
    """
    lam = _check_lambdas(lambdas)
    if not T >= K >= 1:
        raise DomainError(f"need T >= K >= 1, got T={T}, K={K}")
    logs = np.log(np.maximum(lam, np.finfo(float).tiny))
    num = np.concatenate(([0.0], np.cumsum(logs)))
    den_terms = logs + math.log(T / K)
    den = np.concatenate((np.cumsum(den_terms[::-1])[::-1], [0.0]))
    return num - den


def estimate_s_argmax_alt(lambdas, T: int, K: int) -> TrendEstimate:
    scores = argmax_alt_scores(lambdas, T, K)
    return TrendEstimate(int(np.argmax(scores)), Method.ARGMAX_ALT, {"log_scores": scores.tolist()})


def estimate_s_sequence(
    lambdas, K: int, norm, eta: float, cvs: CriticalValueTable
) -> TrendEstimate:
    """Test ``s = i`` for i = p, p-1, ..., 1 and stop at the first non-rejection.

    ``eta`` is the significance level of each test; the critical value for
    order ``i`` is the ``1 - eta`` quantile of the dimension-``i`` limit law.
    Returns 0 when every test rejects.
    """
    lam = _check_lambdas(lambdas)
    norm = NormKind(norm)
    if not 0.0 < eta < 1.0:
        raise DomainError(f"significance level must lie in (0, 1), got {eta!r}")
    p = lam.size
    level = round(1.0 - eta, 12)
    stats = test_statistics(lam, K, norm)
    crit = np.array([cvs.lookup(i, norm, level) for i in range(1, p + 1)])
    s_hat = 0
    for i in range(p, 0, -1):
        if stats[i - 1] <= crit[i - 1]:
            s_hat = i
            break
    method = Method.SEQ_ONE if norm is NormKind.ONE else Method.SEQ_INF
    diag = {"statistics": stats.tolist(), "critical_values": crit.tolist()}
    return TrendEstimate(s_hat, method, diag, eta)


def estimate_s(
    lambdas,
    method,
    *,
    T: int | None = None,
    K: int | None = None,
    eta: float = 0.05,
    cvs: CriticalValueTable | None = None,
) -> TrendEstimate:
    """Dispatch to the estimator named by ``method``."""
    method = Method(method)
    if method is Method.MAXGAP:
        return estimate_s_maxgap(lambdas)
    if method is Method.ARGMAX_ALT:
        return estimate_s_argmax_alt(lambdas, T, K)
    if cvs is None:
        raise DomainError(f"{method.value} needs a critical value table")
    return estimate_s_sequence(lambdas, K, method.norm, eta, cvs)
