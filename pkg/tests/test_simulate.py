import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from sdshuffle.core import InvalidParameterError
from sdshuffle.simulate import (
    PRESETS,
    Family,
    SimSpec,
    ar1_covariance,
    copula_uniforms,
    preset_specs,
    resolve,
    simulate,
    simulate_benchmark,
    simulate_exponential_copula,
    simulate_gaussian_ar,
)

N = 100_000


def ks_critical(n, alpha=0.01):
    return stats.kstwo.ppf(1 - alpha, n)


def test_p1_mean():
    x = simulate_gaussian_ar(SimSpec(Family.GAUSSIAN_AR, 10_000, 1, seed=3, mu=(1.7,)))
    assert abs(x.values.mean() - 1.7) < 4 / np.sqrt(10_000)
    assert abs(x.values.std() - 1.0) < 0.05


def test_rho_zero_independent():
    n = 20_000
    x = simulate_gaussian_ar(SimSpec(Family.GAUSSIAN_AR, n, 4, seed=1, rho=0.0))
    c = np.corrcoef(x.values.T)
    assert np.all(np.abs(c[np.triu_indices(4, 1)]) < 4 / np.sqrt(n))


def test_rho_half_correlations():
    x = simulate_gaussian_ar(SimSpec(Family.GAUSSIAN_AR, N, 3, seed=2, rho=0.5))
    c = np.corrcoef(x.values.T)
    assert c[0, 1] == pytest.approx(0.5, abs=0.01)
    assert c[0, 2] == pytest.approx(0.25, abs=0.01)


def test_covariance_converges():
    spec = SimSpec(Family.GAUSSIAN_AR, N, 5, seed=4, rho=-0.6)
    x = simulate_gaussian_ar(spec).values
    assert np.all(np.abs(np.cov(x.T) - ar1_covariance(5, -0.6)) < 5 / np.sqrt(N))


def test_exponential_mean_and_ks():
    x = simulate_exponential_copula(SimSpec(Family.EXPONENTIAL_COPULA, N, 3, seed=5, rho=0.4, lam=2.0)).values
    np.testing.assert_allclose(x.mean(axis=0), 0.5, atol=0.01)
    ind = simulate_exponential_copula(SimSpec(Family.EXPONENTIAL_COPULA, N, 2, seed=6, rho=0.0, lam=2.0)).values
    d = stats.kstest(ind[:, 0], stats.expon(scale=0.5).cdf).statistic
    assert d < ks_critical(N)


def test_uniforms_strictly_inside():
    u = copula_uniforms(np.array([-50.0, -9.0, 0.0, 9.0, 50.0]))
    assert np.all((u > 0) & (u < 1))


def test_benchmark_covariance():
    cov = ar1_covariance(4, -0.75)
    assert cov[0, 1] == -0.75 and np.all(np.diag(cov) == 1)
    x = simulate_benchmark(N, 3, seed=7).values
    assert np.corrcoef(x.T)[0, 1] == pytest.approx(-0.75, abs=0.02)
    np.testing.assert_allclose(x.mean(axis=0), 0, atol=0.02)


def test_resolve_draws_in_ranges():
    for seed in range(50):
        g = resolve(SimSpec(Family.GAUSSIAN_AR, 10, 6, seed))
        assert -0.8 <= g.rho <= 0.8 and all(-3 <= m <= 3 for m in g.mu)
        e = resolve(SimSpec(Family.EXPONENTIAL_COPULA, 10, 6, seed))
        assert 0.1 <= e.lam <= 10


def test_explicit_values_win():
    s = resolve(SimSpec(Family.EXPONENTIAL_COPULA, 10, 2, 1, rho=0.3, lam=4.0))
    assert (s.rho, s.lam) == (0.3, 4.0)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(list(Family)),
    st.integers(2, 60),
    st.integers(1, 8),
    st.integers(0, 2**64 - 1),
)
def test_deterministic_and_valid(family, n, p, seed):
    spec = SimSpec(family, n, p, seed)
    a, b = simulate(spec), simulate(spec)
    assert a.shape == (n, p)
    assert np.all(np.isfinite(a.values))
    assert a.values.tobytes() == b.values.tobytes()


def test_presets():
    assert PRESETS["gaussian-sim"].n == 500 and PRESETS["gaussian-sim"].p == 10
    specs = preset_specs("exponential-sim", 3)
    assert len(specs) == 30 and len({s.seed for s in specs}) == 30
    assert all(s.family is Family.EXPONENTIAL_COPULA for s in specs)
    assert len(preset_specs("gaussian-sim", 3, datasets=4)) == 4
    with pytest.raises(InvalidParameterError):
        preset_specs("nope", 0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(n=1), dict(p=0), dict(rho=1.0), dict(rho=-1.2), dict(lam=0.0), dict(mu=(1.0,)), dict(seed=-1)],
)
def test_spec_validation(kwargs):
    args = dict(family=Family.GAUSSIAN_AR, n=10, p=2)
    args.update(kwargs)
    with pytest.raises(InvalidParameterError):
        SimSpec(**args)
