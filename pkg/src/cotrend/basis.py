"""Orthonormal L2[0,1] basis functions and discretized design matrices."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from cotrend.errors import DimensionError, DomainError

SQRT2 = math.sqrt(2.0)


class BasisKind(str, enum.Enum):
    """Tag for the basis used to build a design matrix.

    Only the Karhunen-Loeve sine system of Brownian motion is provided; the
    limit distributions used by the sequential tests are specific to it.
    """

    KL = "KL"


def kl_basis_value(k: int, u: float) -> float:
    """Value of the k-th Karhunen-Loeve basis function at ``u``.

    ``sqrt(2) * sin((k - 1/2) * pi * u)`` for ``k >= 1`` and ``u`` in [0, 1].
    """
    if int(k) != k or k < 1:
        raise DomainError(f"basis index must be a positive integer, got {k!r}")
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"basis argument must lie in [0, 1], got {u!r}")
    return SQRT2 * math.sin((k - 0.5) * math.pi * u)


def _kl_values(T: int, K: int) -> np.ndarray:
    u = np.arange(1, T + 1, dtype=float) / T
    freq = (np.arange(1, K + 1, dtype=float) - 0.5) * np.pi
    return SQRT2 * np.sin(np.outer(u, freq))


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """T x K matrix whose row t holds the basis evaluated at t/T."""

    values: np.ndarray
    kind: BasisKind = BasisKind.KL

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def K(self) -> int:
        return self.values.shape[1]

    @cached_property
    def moment(self) -> np.ndarray:
        """``M_dd = T^-1 sum_t d_t d_t'``."""
        return self.values.T @ self.values / self.T

    @cached_property
    def condition(self) -> float:
        return float(np.linalg.cond(self.moment))

    @cached_property
    def orthobasis(self) -> np.ndarray:
        """Orthonormal basis (T x K) of the column space of ``values``."""
        q, _ = np.linalg.qr(self.values)
        return q


def design_matrix(T: int, K: int, kind: BasisKind = BasisKind.KL) -> DesignMatrix:
    """Evaluate the first ``K`` basis functions on the grid 1/T, 2/T, ..., 1."""
    if T < 1 or K < 1:
        raise DimensionError(f"need T >= 1 and K >= 1, got T={T}, K={K}")
    if K > T:
        raise DimensionError(f"number of basis elements K={K} exceeds T={T}")
    kind = BasisKind(kind)
    if kind is not BasisKind.KL:  # pragma: no cover - single member today
        raise DomainError(f"unsupported basis {kind}")
    values = _kl_values(T, K)
    values.setflags(write=False)
    return DesignMatrix(values, kind)


def default_K(T: int) -> int:
    """Default number of basis elements, ``ceil(T ** 0.75)``."""
    if T < 1:
        raise DomainError(f"T must be positive, got {T}")
    K = int(math.ceil(T ** 0.75))
    # guard against rounding in the power: K is the least integer with K^4 >= T^3
    while K > 1 and (K - 1) ** 4 >= T ** 3:
        K -= 1
    while K ** 4 < T ** 3:
        K += 1
    return K
