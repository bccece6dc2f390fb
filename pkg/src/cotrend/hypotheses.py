"""Inclusion hypotheses on the attractor space and their decision rules.

A hypothesis ``col psi <= col A`` or ``col a <= col psi`` holds exactly when
the subsystem ``H'X`` carries ``n`` trends and ``H_perp'X`` carries ``s - n``
trends, where ``(H, n) = (A, s)`` or ``(a, q)``.  Both counts are estimated
with the same machinery used for the full system.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from cotrend.basis import DesignMatrix, default_K, design_matrix
from cotrend.cca import SeriesPanel, squared_canonical_correlations
from cotrend.critical_values import CriticalValueTable
from cotrend.errors import DimensionError, DomainError
from cotrend.trends import Method, estimate_s

RANK_TOL = 1e-10


class HypothesisKind(str, enum.Enum):
    CONTAINED_IN = "contained-in"  # col psi <= col A
    CONTAINS = "contains"  # col a <= col psi


class Rule(str, enum.Enum):
    JOINT = "joint"
    SINGLE = "single"


def numerical_rank(M, tol: float = RANK_TOL) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def orthogonal_complement(M) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``col M``.

    Returns a ``p x (p - q)`` matrix; when ``q = p`` the result has no
    columns.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    p, q = M.shape
    if q > p or numerical_rank(M) != q:
        raise DomainError(f"matrix of shape {M.shape} does not have full column rank")
    if q == p:
        return np.zeros((p, 0))
    N = null_space(M.T, rcond=RANK_TOL)
    # deterministic signs: largest entry of each column positive
    idx = np.argmax(np.abs(N), axis=0)
    N = N * np.sign(N[idx, np.arange(N.shape[1])])
    return N


@dataclass(frozen=True)
class RankProfile:
    rank_H: int
    rank_Hperp: int


def rank_profile(psi, H, tol: float = RANK_TOL) -> RankProfile:
    """Numerical ranks of ``H' psi`` and ``H_perp' psi``."""
    psi = np.atleast_2d(np.asarray(psi, dtype=float).T).T
    H = np.atleast_2d(np.asarray(H, dtype=float).T).T
    if psi.shape[0] != H.shape[0]:
        raise DimensionError(f"psi has {psi.shape[0]} rows, H has {H.shape[0]}")
    if numerical_rank(psi, tol) != psi.shape[1]:
        raise DomainError("psi does not have full column rank")
    Hp = orthogonal_complement(H)
    return RankProfile(numerical_rank(H.T @ psi, tol), numerical_rank(Hp.T @ psi, tol))


@dataclass(frozen=True, eq=False)
class HypothesisSpec:
    """A subspace hypothesis with its full-column-rank restriction matrix.

    ``matrix`` is ``A`` (p x m) for ``CONTAINED_IN`` and ``a`` (p x q) for
    ``CONTAINS``; ``s_full`` is the number of trends in the full system.
    """

    kind: HypothesisKind
    matrix: np.ndarray
    s_full: int
    name: str = ""

    def __post_init__(self):
        kind = HypothesisKind(self.kind)
        M = np.array(self.matrix, dtype=float)
        if M.ndim == 1:
            M = M[:, None]
        if M.ndim != 2 or M.shape[1] < 1:
            raise DimensionError(f"restriction matrix must be p x l with l >= 1, got {M.shape}")
        p, l = M.shape
        if numerical_rank(M) != l:
            raise DomainError("restriction matrix does not have full column rank")
        if not 1 <= self.s_full <= p:
            raise DomainError(f"s_full must lie in 1..{p}, got {self.s_full}")
        if kind is HypothesisKind.CONTAINED_IN and l < self.s_full:
            raise DomainError(f"col psi <= col A needs l >= s, got l={l}, s={self.s_full}")
        if kind is HypothesisKind.CONTAINS and l > self.s_full:
            raise DomainError(f"col a <= col psi needs l <= s, got l={l}, s={self.s_full}")
        M.setflags(write=False)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "s_full", int(self.s_full))

    @property
    def p(self) -> int:
        return self.matrix.shape[0]

    @property
    def l(self) -> int:
        return self.matrix.shape[1]

    @property
    def H(self) -> np.ndarray:
        return self.matrix

    @property
    def n(self) -> int:
        return min(self.l, self.s_full)

    @cached_property
    def H_perp(self) -> np.ndarray:
        return orthogonal_complement(self.matrix)

    @property
    def expected(self) -> tuple[int, int]:
        return self.n, self.s_full - self.n

    def varsigma(self, eta: float) -> float:
        """Limit rejection rate of the complement side under the null."""
        return 0.0 if self.kind is HypothesisKind.CONTAINED_IN else float(eta)


def _column_labels(M: np.ndarray, labels: Sequence[str], prefix: str) -> tuple[str, ...]:
    out = []
    for j in range(M.shape[1]):
        col = M[:, j]
        k = int(np.argmax(np.abs(col)))
        rest = np.delete(col, k)
        if np.all(np.abs(rest) <= 1e-12 * abs(col[k])) and abs(abs(col[k]) - 1) < 1e-12:
            out.append(labels[k] if col[k] > 0 else f"-{labels[k]}")
        else:
            out.append(f"{prefix}{j + 1}")
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Subsystems:
    h_panel: SeriesPanel
    hperp_panel: SeriesPanel | None
    expected: tuple[int, int]


def subsystems(x: SeriesPanel, spec: HypothesisSpec) -> Subsystems:
    """Panels ``H'X`` and ``H_perp'X``; the latter is ``None`` when ``H`` is square."""
    if spec.p != x.p:
        raise DimensionError(f"hypothesis is for p={spec.p}, panel has p={x.p}")
    h = SeriesPanel(x.values @ spec.H, _column_labels(spec.H, x.labels, "H"), x.index)
    hp = None
    if spec.H_perp.shape[1]:
        hp = SeriesPanel(
            x.values @ spec.H_perp, _column_labels(spec.H_perp, x.labels, "Hperp"), x.index
        )
    return Subsystems(h, hp, spec.expected)


@dataclass(frozen=True)
class DecisionOutcome:
    """Indicators ``w`` (H side), ``v`` (complement side) and the decision ``z``.

    ``z = 1`` means the hypothesis is not rejected.
    """

    w: int
    v: int
    z: int
    rule: Rule
    s_hat_H: int
    s_hat_Hperp: int
    expected: tuple[int, int]
    method: Method
    nu: float | None = None
    eta: float | None = None
    varsigma: float | None = None
    lambdas_H: tuple[float, ...] = field(default=(), repr=False)
    lambdas_Hperp: tuple[float, ...] = field(default=(), repr=False)


def decision_rule(s_hat_H: int, s_hat_Hperp: int, expected, rule=Rule.JOINT):
    """Return ``(w, v, z)`` for the given subsystem estimates."""
    n, rest = expected
    w = int(s_hat_H == n)
    v = int(s_hat_Hperp == rest)
    z = w * v if Rule(rule) is Rule.JOINT else v
    return w, v, z


def decide_from_lambdas(
    lambdas_H,
    lambdas_Hperp,
    spec: HypothesisSpec,
    method,
    *,
    T: int,
    K: int,
    nu: float = 0.05,
    eta: float = 0.05,
    rule=Rule.JOINT,
    cvs: CriticalValueTable | None = None,
) -> DecisionOutcome:
    """Decision from precomputed subsystem eigenvalues (empty complement allowed)."""
    method = Method(method)
    s_H = estimate_s(lambdas_H, method, T=T, K=K, eta=nu, cvs=cvs).s_hat
    if len(lambdas_Hperp):
        s_P = estimate_s(lambdas_Hperp, method, T=T, K=K, eta=eta, cvs=cvs).s_hat
    else:
        s_P = 0
    w, v, z = decision_rule(s_H, s_P, spec.expected, rule)
    seq = method.sequential
    return DecisionOutcome(
        w, v, z, Rule(rule), s_H, s_P, spec.expected, method,
        nu if seq else None, eta if seq else None, spec.varsigma(eta) if seq else None,
        tuple(float(v) for v in lambdas_H), tuple(float(v) for v in lambdas_Hperp),
    )


def decide(
    x: SeriesPanel,
    spec: HypothesisSpec,
    method=Method.MAXGAP,
    *,
    K: int | None = None,
    nu: float = 0.05,
    eta: float = 0.05,
    rule=Rule.JOINT,
    cvs: CriticalValueTable | None = None,
    design: DesignMatrix | None = None,
) -> DecisionOutcome:
    """Estimate trend counts on both subsystems and apply the decision rule.

    ``nu`` is the significance level of the test sequence on ``H'X`` and
    ``eta`` that on ``H_perp'X``; both are ignored by the argmax methods.
    """
    if design is None:
        design = design_matrix(x.T, K if K is not None else default_K(x.T))
    sub = subsystems(x, spec)
    lam_H = squared_canonical_correlations(sub.h_panel, design).lambdas
    lam_P = (
        squared_canonical_correlations(sub.hperp_panel, design).lambdas
        if sub.hperp_panel is not None
        else np.empty(0)
    )
    return decide_from_lambdas(
        lam_H, lam_P, spec, method, T=x.T, K=design.K, nu=nu, eta=eta, rule=rule, cvs=cvs
    )


def _unit(p: int, idx: Sequence[int]) -> np.ndarray:
    E = np.zeros((p, len(idx)))
    E[list(idx), np.arange(len(idx))] = 1.0
    return E


def _check_indices(p: int, indices) -> list[int]:
    idx = [int(i) for i in indices]
    if not idx:
        raise DomainError("index set must be nonempty")
    if len(set(idx)) != len(idx):
        raise DomainError(f"duplicate indices in {idx}")
    if any(not 1 <= i <= p for i in idx):
        raise DomainError(f"indices must lie in 1..{p}, got {idx}")
    return [i - 1 for i in idx]


def build_aggregation_hypothesis(p: int) -> tuple[HypothesisSpec, HypothesisSpec]:
    """``col psi <= col iota`` and ``col iota <= col psi`` with one trend.

    Both hold together exactly when ``psi`` is proportional to the vector of
    ones.
    """
    if p < 2:
        raise DomainError(f"aggregation needs p >= 2, got {p}")
    iota = np.ones((p, 1))
    return (
        HypothesisSpec(HypothesisKind.CONTAINED_IN, iota, 1, "aggregation: col psi <= col iota"),
        HypothesisSpec(HypothesisKind.CONTAINS, iota, 1, "aggregation: col iota <= col psi"),
    )


def build_autonomy_hypothesis(p: int, indices, s_full: int | None = None) -> HypothesisSpec:
    """Variables in ``indices`` (1-based) do not cointegrate: ``col{e_i} <= col psi``."""
    idx = _check_indices(p, indices)
    s_full = len(idx) if s_full is None else s_full
    return HypothesisSpec(
        HypothesisKind.CONTAINS, _unit(p, idx), s_full,
        f"autonomy of {{{', '.join(str(i + 1) for i in idx)}}}",
    )


def build_balanced_growth_hypothesis(p: int, groups, s_full: int | None = None) -> HypothesisSpec:
    """Each group (1-based indices) shares one trend with unit loadings.

    The restriction vector of a group is the sum of its unit vectors.
    """
    if not groups:
        raise DomainError("need at least one group")
    cols = []
    seen: set[int] = set()
    for g in groups:
        idx = _check_indices(p, g)
        if seen.intersection(idx):
            raise DomainError("balanced growth groups must be disjoint")
        seen.update(idx)
        cols.append(_unit(p, idx).sum(axis=1))
    s_full = len(cols) if s_full is None else s_full
    return HypothesisSpec(HypothesisKind.CONTAINS, np.column_stack(cols), s_full, "balanced growth")
