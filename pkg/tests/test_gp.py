import math

import numpy as np
import pytest

from ckptmerge.errors import DuplicateError, NumericalError
from ckptmerge.gp import (
    KernelParams,
    KernelPolicy,
    Observation,
    gp_fit,
    gp_posterior,
    kernel_eval,
    log_marginal_likelihood,
    posterior,
)


def inverse_oracle(x, y, xs, var, ls, noise, mu0):
    """Posterior via an explicit matrix inverse, independent of the Cholesky path."""
    k = lambda a, b: var * math.exp(-0.5 * ((a - b) / ls) ** 2)
    K = np.array([[k(a, b) for b in x] for a in x]) + noise * np.eye(len(x))
    Kinv = np.linalg.inv(K)
    means, vars_ = [], []
    for q in xs:
        ks = np.array([k(q, a) for a in x])
        means.append(mu0 + ks @ Kinv @ (np.asarray(y) - mu0))
        vars_.append(var - ks @ Kinv @ ks)
    return np.array(means), np.array(vars_)


def test_kernel_values():
    p = KernelParams(1.0, 1.0)
    assert kernel_eval(p, 0.3, 0.3) == 1.0
    assert kernel_eval(p, 0.0, 1.0) == pytest.approx(0.60653, abs=5e-6)
    assert kernel_eval(KernelParams(2.5, 0.1), 0.4, 0.4) == 2.5


@pytest.mark.parametrize("bad", [dict(variance=0.0), dict(length_scale=-1.0), dict(noise=-1e-9)])
def test_kernel_params_validation(bad):
    with pytest.raises(ValueError):
        KernelParams(**bad)


def test_single_observation_interpolates():
    m = gp_fit([Observation(0.5, 2.0)], KernelParams(1.0, 0.1, 0.0))
    mean, var = gp_posterior(m, 0.5)
    assert mean == pytest.approx(2.0, abs=1e-12)
    assert var == pytest.approx(0.0, abs=1e-12)


def test_duplicate_inputs_at_zero_noise():
    with pytest.raises(DuplicateError):
        gp_fit([Observation(0.5, 1.0), Observation(0.5, 1.1)], KernelParams(noise=0.0))
    # with noise the repeated input is fine
    gp_fit([Observation(0.5, 1.0), Observation(0.5, 1.1)], KernelParams(noise=1e-3))


def test_matches_inverse_oracle(bound_backend, rng):
    x = rng.uniform(0.5, 1.0, 10)
    y = rng.standard_normal(10)
    params = KernelParams(1.7, 0.15, 1e-4)
    m = gp_fit(list(zip(x, y)), params, prior_mean=0.3)
    xs = rng.uniform(0.4, 1.1, 100)
    mean, var = posterior(m, xs, clamp=False)
    om, ov = inverse_oracle(x, y, xs, 1.7, 0.15, 1e-4, 0.3)
    np.testing.assert_allclose(mean, om, atol=1e-6)
    np.testing.assert_allclose(var, ov, atol=1e-6)


def test_two_point_closed_form():
    m = gp_fit([Observation(0.5, 1.0), Observation(1.0, 2.0)], KernelParams(1.0, 0.5, 0.0))
    mean, var = gp_posterior(m, 0.75)
    e = math.exp(-0.5)  # k(0.5, 1.0)
    c = math.exp(-0.125)  # k(0.75, 0.5) = k(0.75, 1.0)
    # K = [[1, e], [e, 1]] and k* = [c, c]; [1, 1] is an eigenvector with eigenvalue 1 + e
    assert mean == pytest.approx(c * (1.0 + 2.0) / (1.0 + e), abs=1e-12)
    assert var == pytest.approx(1.0 - 2.0 * c * c / (1.0 + e), abs=1e-12)


def test_prior_reversion():
    m = gp_fit([Observation(0.5, 3.0), Observation(0.6, -1.0)], KernelParams(2.0, 0.01, 0.0), prior_mean=0.7)
    mean, var = gp_posterior(m, 5.0)
    assert mean == pytest.approx(0.7, abs=1e-6)
    assert var == pytest.approx(2.0, abs=1e-6)


def test_interpolation_at_observed(rng):
    x = np.sort(rng.uniform(0.5, 1.0, 6))
    y = rng.standard_normal(6)
    m = gp_fit(list(zip(x, y)), KernelParams(1.0, 0.05, 0.0))
    mean, var = posterior(m, x)
    np.testing.assert_allclose(mean, y, atol=1e-8)
    assert np.all(np.abs(var) <= 1e-8)


def test_variance_grows_away_from_data():
    m = gp_fit([Observation(0.5, 0.0)], KernelParams(1.0, 0.1, 0.0))
    _, var = posterior(m, np.linspace(0.5, 1.0, 50))
    assert np.all(np.diff(var) >= -1e-15)
    assert np.all(var >= 0)


def test_jitter_ladder_rescues_near_duplicates():
    obs = [Observation(0.5, 0.0), Observation(0.5 + 1e-12, 0.0), Observation(0.9, 1.0)]
    m = gp_fit(obs, KernelParams(1.0, 0.5, 0.0))
    assert m.jitter > 0
    assert m.jitter <= 1e-4


def test_jitter_ladder_exhausted():
    # a huge variance makes 1e-4 of jitter negligible
    obs = [Observation(0.5, 0.0), Observation(0.5 + 1e-13, 0.0)]
    with pytest.raises(NumericalError):
        gp_fit(obs, KernelParams(1e14, 0.5, 0.0))


def test_lml_matches_direct_formula(rng):
    x, y = rng.uniform(0.5, 1, 5), rng.standard_normal(5)
    m = gp_fit(list(zip(x, y)), KernelParams(1.2, 0.2, 1e-3), prior_mean=0.1)
    K = 1.2 * np.exp(-0.5 * ((x[:, None] - x[None, :]) / 0.2) ** 2) + 1e-3 * np.eye(5)
    r = y - 0.1
    want = -0.5 * r @ np.linalg.solve(K, r) - 0.5 * np.linalg.slogdet(K)[1] - 2.5 * math.log(2 * math.pi)
    assert log_marginal_likelihood(m) == pytest.approx(want, rel=1e-10)


class TestKernelPolicy:
    def test_defaults(self):
        obs = [Observation(0.5, 1.0), Observation(1.0, 3.0)]
        m = KernelPolicy().fit(obs, alpha=0.5)
        assert m.params.length_scale == pytest.approx(0.1)
        assert m.params.variance == pytest.approx(2.0)  # ddof=1 variance of (1, 3)
        assert m.params.noise == 1e-6
        assert m.prior_mean == 2.0

    def test_constant_values_fall_back_to_unit_variance(self):
        m = KernelPolicy().fit([Observation(0.5, 4.0), Observation(1.0, 4.0)], alpha=0.5)
        assert m.params.variance == 1.0

    def test_refine_picks_best_lml(self, rng):
        x = np.linspace(0.5, 1, 8)
        obs = [Observation(a, math.sin(20 * a)) for a in x]
        policy = KernelPolicy(refine=True)
        m = policy.fit(obs, alpha=0.5)
        lmls = []
        for f in (0.05, 0.1, 0.2, 0.4):
            lmls.append(log_marginal_likelihood(gp_fit(obs, policy.params_for([o[1] for o in obs], 0.5, f), m.prior_mean)))
        assert log_marginal_likelihood(m) == pytest.approx(max(lmls))
