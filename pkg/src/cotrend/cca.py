"""Squared canonical correlations between a panel and a deterministic design."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import cholesky, eigh, solve_triangular

from cotrend.basis import DesignMatrix
from cotrend.errors import DataError, DimensionError, SingularMomentError

COND_CAP = 1e12
CLAMP_WARN = 1e-8


class ClampWarning(RuntimeWarning):
    """Eigenvalues needed clamping into [0, 1] by more than rounding noise."""


@dataclass(frozen=True, eq=False)
class SeriesPanel:
    """A T x p panel of observations with column labels."""

    values: np.ndarray
    labels: tuple[str, ...] = ()
    index: tuple[str, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DimensionError(f"panel must be 2-dimensional, got shape {values.shape}")
        T, p = values.shape
        if T < 1 or p < 1:
            raise DimensionError(f"panel needs T >= 1 and p >= 1, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise DataError("panel has non-finite entries", row=int(bad[0]), column=int(bad[1]))
        labels = tuple(self.labels) if len(self.labels) else tuple(f"x{i + 1}" for i in range(p))
        if len(labels) != p:
            raise DimensionError(f"{len(labels)} labels for {p} columns")
        if self.index is not None and len(self.index) != T:
            raise DimensionError(f"{len(self.index)} index entries for {T} rows")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def select(self, columns: Sequence[int]) -> "SeriesPanel":
        columns = list(columns)
        return SeriesPanel(
            self.values[:, columns], tuple(self.labels[i] for i in columns), self.index
        )


@dataclass(frozen=True, eq=False)
class CcaOutput:
    """Descending squared canonical correlations and their eigenvectors.

    ``directions[:, i]`` solves the pencil for ``lambdas[i]`` and the columns
    are orthonormal in the ``M_yy`` inner product.
    """

    lambdas: np.ndarray
    directions: np.ndarray
    T: int
    K: int
    p: int
    clamp_excess: float = 0.0


def moment(A, B) -> np.ndarray:
    """Cross moment ``T^-1 sum_t a_t b_t'`` of two samples with ``T`` rows."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if B.ndim == 1:
        B = B[:, None]
    if A.shape[0] != B.shape[0]:
        raise DimensionError(f"row counts differ: {A.shape[0]} vs {B.shape[0]}")
    return A.T @ B / A.shape[0]


def _as_values(y) -> np.ndarray:
    if isinstance(y, SeriesPanel):
        return y.values
    return SeriesPanel(y).values


def squared_canonical_correlations(
    y, d: DesignMatrix, cond_cap: float = COND_CAP
) -> CcaOutput:
    """Solve ``|lambda M_yy - M_yd M_dd^-1 M_dy| = 0``.

    The pencil is reduced to a symmetric eigenproblem by whitening with the
    Cholesky factor of ``M_yy``. No centering is applied to ``y``.

    Parameters
    ----------
    y : SeriesPanel or array_like
        T x p observations.
    d : DesignMatrix
        T x K deterministic regressors, ``K >= p``.
    cond_cap : float
        Condition number above which a moment matrix is declared singular.
    """
    Y = _as_values(y)
    T, p = Y.shape
    if d.T != T:
        raise DimensionError(f"panel has T={T} rows but design has T={d.T}")
    if d.K < p:
        raise DimensionError(f"need K >= p, got K={d.K} < p={p}")

    if d.condition > cond_cap:
        raise SingularMomentError("M_dd", d.condition)
    Myy = moment(Y, Y)
    cond_yy = np.linalg.cond(Myy)
    if not np.isfinite(cond_yy) or cond_yy > cond_cap:
        raise SingularMomentError("M_yy", cond_yy)

    # M_yd M_dd^-1 M_dy equals G'G/T with G the projection coordinates of Y on col(d)
    G = d.orthobasis.T @ Y
    C = G.T @ G / T
    L = cholesky(Myy, lower=True)
    S = solve_triangular(L, solve_triangular(L, C, lower=True).T, lower=True)
    S = (S + S.T) / 2
    w, U = eigh(S)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    U = U[:, order]
    directions = solve_triangular(L.T, U, lower=False)

    excess = float(max(0.0, w.max() - 1.0, -w.min()))
    if excess > CLAMP_WARN:
        warnings.warn(
            f"eigenvalues clamped into [0, 1] by {excess:.3g}", ClampWarning, stacklevel=2
        )
    lambdas = np.clip(w, 0.0, 1.0)
    return CcaOutput(lambdas, directions, T, d.K, p, excess)
