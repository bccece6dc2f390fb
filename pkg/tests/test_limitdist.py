import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from cotrend.errors import DomainError, SingularGramError
from cotrend.limitdist import (
    confidence_stripe,
    simulate_zeta,
    simulate_zeta_nested,
    zeta1_cdf,
    zeta1_mean,
    zeta1_pdf,
    zeta1_quantile,
    zeta1_sf,
)


def _integrate(fn, lo=0.0, hi=np.inf):
    pieces = [lo, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0, 1e3, 1e4, hi]
    total = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        total += integrate.quad(fn, a, b, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
    return total


@pytest.mark.parametrize(
    "prob, expected", [(0.90, 13.06582), (0.95, 17.71180), (0.99, 29.01932)]
)
def test_quantiles_reference(prob, expected):
    assert zeta1_quantile(prob) == pytest.approx(expected, abs=1e-4)


def test_cdf_at_zero_is_exact():
    assert zeta1_cdf(0.0) == 0.0
    assert zeta1_sf(0.0) == 1.0


def test_density_vanishes_near_zero():
    assert zeta1_pdf(1e-4) == 0.0
    assert 0.0 <= zeta1_pdf(0.02) < 1e-15 < zeta1_pdf(0.05) < zeta1_pdf(0.1)


def test_density_needs_positive_argument():
    with pytest.raises(DomainError):
        zeta1_pdf(0.0)


def test_mean_reference():
    assert zeta1_mean() == pytest.approx(5.56291, abs=1e-4)
    assert zeta1_mean() == pytest.approx(2 * (1 + 1.78143), abs=1e-3)


def test_density_integrates_to_one():
    assert _integrate(lambda z: float(zeta1_pdf(z))) == pytest.approx(1.0, abs=1e-6)


def test_mean_by_quadrature():
    sf = lambda z: float(zeta1_sf(z))  # noqa: E731
    assert _integrate(sf) == pytest.approx(zeta1_mean(), abs=1e-6)


@pytest.mark.parametrize("k, expected", [(1, 0.5), (2, 7.0 / 12.0)])
def test_inverse_moments_match_brownian_energy(k, expected):
    # 1/zeta = int_0^1 B^2 has mean 1/2 and second moment 1/3 + 1/4
    value = _integrate(lambda z: float(zeta1_pdf(z)) / z**k, lo=1e-3)
    assert value == pytest.approx(expected, abs=1e-7)


def test_derivative_of_cdf_is_density():
    z = np.linspace(0.5, 50, 400)
    h = 1e-5
    fd = (zeta1_cdf(z + h) - zeta1_cdf(z - h)) / (2 * h)
    np.testing.assert_allclose(fd, zeta1_pdf(z), atol=1e-5)


@pytest.mark.parametrize("prob", [1e-6, 0.01, 0.25, 0.5, 0.9, 0.999, 1 - 1e-9])
def test_quantile_inverts_cdf(prob):
    assert zeta1_cdf(zeta1_quantile(prob)) == pytest.approx(prob, abs=1e-6)


@given(st.floats(0.2, 500.0))
def test_cdf_sf_complement(z):
    assert zeta1_cdf(z) + zeta1_sf(z) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50)
@given(st.floats(0.0, 200.0), st.floats(0.0, 200.0))
def test_cdf_monotone(a, b):
    lo, hi = sorted((a, b))
    assert zeta1_cdf(lo) <= zeta1_cdf(hi) + 1e-15


def test_vectorised_shapes():
    z = np.array([[0.01, 1.0], [10.0, 100.0]])
    for fn in (zeta1_pdf, zeta1_cdf, zeta1_sf):
        out = fn(z)
        assert out.shape == z.shape
        assert np.all(np.isfinite(out))


@pytest.mark.parametrize("fn", [zeta1_pdf, zeta1_cdf, zeta1_sf])
def test_negative_argument_rejected(fn):
    with pytest.raises(DomainError):
        fn(-1.0)


@pytest.mark.parametrize("prob", [0.0, 1.0, -0.1, 2.0, float("nan")])
def test_quantile_domain(prob):
    with pytest.raises(DomainError):
        zeta1_quantile(prob)


def test_simulation_agrees_with_exact_law():
    draws = simulate_zeta(1, 4000, grid=500, seed=3)
    res = stats.kstest(draws.values[:, 0], lambda z: zeta1_cdf(z))
    assert res.pvalue > 1e-3


def test_simulation_deterministic_and_chunk_free():
    a = simulate_zeta(3, 450, grid=200, seed=9)
    b = simulate_zeta(3, 450, grid=200, seed=9)
    np.testing.assert_array_equal(a.values, b.values)
    prefix = simulate_zeta(3, 250, grid=200, seed=9)
    np.testing.assert_array_equal(prefix.values, a.values[:250])


def test_nested_dimensions_share_paths():
    nested = simulate_zeta_nested([2, 4], 300, grid=200, seed=1)
    alone = simulate_zeta(2, 300, grid=200, seed=1)
    np.testing.assert_array_equal(nested[2].values, alone.values)
    assert nested[4].values.shape == (300, 4)


def test_workers_do_not_change_draws():
    a = simulate_zeta(2, 500, grid=150, seed=4, workers=1)
    b = simulate_zeta(2, 500, grid=150, seed=4, workers=2)
    np.testing.assert_array_equal(a.values, b.values)


def test_draws_descending_and_positive():
    v = simulate_zeta(5, 300, grid=300, seed=2).values
    assert np.all(v > 0)
    assert np.all(np.diff(v, axis=1) <= 0)


def test_singular_gram_raises():
    with pytest.raises(SingularGramError):
        simulate_zeta(200, 3, grid=100, seed=0)


@pytest.mark.parametrize("kwargs", [dict(dim=0, reps=10), dict(dim=1, reps=0), dict(dim=1, reps=10, grid=10)])
def test_simulation_argument_checks(kwargs):
    with pytest.raises(DomainError):
        simulate_zeta(**kwargs)


def test_stripe_covers_draws():
    draws = simulate_zeta(3, 2000, grid=200, seed=5)
    stripe = confidence_stripe(3, 0.9, draws)
    assert stripe.pointwise
    assert np.all(stripe.lower < stripe.mean) and np.all(stripe.mean < stripe.upper)
    inside = stripe.contains(np.log(draws.values)).mean(axis=0)
    np.testing.assert_allclose(inside, 0.9, atol=0.01)


def test_stripe_argument_checks():
    draws = simulate_zeta(2, 500, grid=150, seed=5)
    with pytest.raises(DomainError):
        confidence_stripe(2, 0.9, draws)
    big = simulate_zeta(2, 1000, grid=150, seed=5)
    with pytest.raises(DomainError):
        confidence_stripe(3, 0.9, big)
    with pytest.raises(DomainError):
        confidence_stripe(2, 1.0, big)


@pytest.mark.parametrize("z", [0.25, 0.4, 0.7, 1.0, 1.5, 2.0])
def test_small_argument_representation_agrees_with_series(z):
    # two unrelated expansions of the same law must coincide where both converge
    from cotrend.limitdist import _smirnov_tail

    F, f = _smirnov_tail(np.array([z]))
    assert F[0] == pytest.approx(zeta1_cdf(z), rel=1e-10)
    assert f[0] == pytest.approx(zeta1_pdf(z), rel=1e-10)


def test_small_argument_tail_is_continuous_and_positive():
    z = np.linspace(0.01, 0.4, 200)
    F, f = zeta1_cdf(z), zeta1_pdf(z)
    assert np.all(F > 0) and np.all(f > 0)
    assert np.all(np.diff(F) > 0)
    # log-density is smooth across the switch between the two expansions
    near = np.linspace(0.19, 0.21, 21)
    assert np.abs(np.diff(np.log(zeta1_pdf(near)), 2)).max() < 1e-3
