import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cotrend.basis import BasisKind, default_K, design_matrix, kl_basis_value
from cotrend.errors import DimensionError, DomainError


@pytest.mark.parametrize(
    "k, u, expected",
    [(1, 0.0, 0.0), (1, 1.0, math.sqrt(2)), (1, 0.5, 1.0), (2, 1.0, -math.sqrt(2))],
)
def test_kl_basis_value_known_points(k, u, expected):
    assert kl_basis_value(k, u) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("k, u", [(0, 0.5), (-1, 0.5), (1.5, 0.5), (1, -0.01), (1, 1.01)])
def test_kl_basis_value_rejects_bad_input(k, u):
    with pytest.raises(DomainError):
        kl_basis_value(k, u)


def test_design_matrix_last_row():
    d = design_matrix(4, 2)
    np.testing.assert_allclose(d.values[-1], [math.sqrt(2), -math.sqrt(2)], atol=1e-12)
    assert d.kind is BasisKind.KL
    assert (d.T, d.K) == (4, 2)


def test_design_matrix_matches_scalar_evaluation():
    T, K = 17, 6
    d = design_matrix(T, K)
    for t in range(1, T + 1):
        for k in range(1, K + 1):
            assert d.values[t - 1, k - 1] == pytest.approx(kl_basis_value(k, t / T), abs=1e-13)


def test_design_matrix_square_is_nearly_orthonormal():
    d = design_matrix(100, 100)
    off = d.moment - np.diag(np.diag(d.moment))
    assert np.abs(off).max() < 0.05


@pytest.mark.parametrize("T", [1000, 10_000])
def test_discrete_orthonormality(T):
    K = 10
    M = design_matrix(T, K).moment
    assert np.abs(M - np.eye(K)).max() < 2 * K / T


def test_design_matrix_is_read_only_and_deterministic():
    a, b = design_matrix(50, 7), design_matrix(50, 7)
    np.testing.assert_array_equal(a.values, b.values)
    with pytest.raises(ValueError):
        a.values[0, 0] = 1.0


def test_orthobasis_spans_design():
    d = design_matrix(40, 5)
    Q = d.orthobasis
    np.testing.assert_allclose(Q.T @ Q, np.eye(5), atol=1e-12)
    np.testing.assert_allclose(Q @ (Q.T @ d.values), d.values, atol=1e-12)


@pytest.mark.parametrize("T, K", [(3, 4), (0, 1), (5, 0)])
def test_design_matrix_dimension_errors(T, K):
    with pytest.raises(DimensionError):
        design_matrix(T, K)


@pytest.mark.parametrize("T, K", [(300, 73), (667, 132), (1, 1), (16, 8), (81, 27), (150, 43)])
def test_default_K(T, K):
    assert default_K(T) == K


@given(st.integers(min_value=1, max_value=10**6))
def test_default_K_is_exact_ceiling(T):
    K = default_K(T)
    assert K**4 >= T**3 and (K - 1) ** 4 < T**3


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 300), st.integers(1, 40))
def test_entries_bounded(T, K):
    K = min(K, T)
    assert np.abs(design_matrix(T, K).values).max() <= math.sqrt(2) + 1e-15


def test_default_K_rejects_nonpositive():
    with pytest.raises(DomainError):
        default_K(0)
