import numpy as np
import pytest
from scipy.stats import multivariate_normal

from eccmar import dgp, estimator, matalg
from eccmar.errors import DimensionError


def _vec_loglik_oracle(params, series):
    """Likelihood of the vectorized system via scipy's multivariate normal."""
    p = params.p
    x = series.data
    diffs = np.diff(x, axis=0)
    mean = (
        np.einsum("ik,tkl,jl->tij", params.lam, x[p - 1 : -1], params.psi)
        - x[p - 1 : -1]
    )
    for i, (g1, g2) in enumerate(zip(params.gamma1, params.gamma2), start=1):
        mean += np.einsum("ik,tkl,jl->tij", g1, diffs[p - 1 - i : -i], g2)
    resid = diffs[p - 1 :] - mean
    v = resid.transpose(0, 2, 1).reshape(resid.shape[0], -1)
    cov = np.kron(params.sigma_c, params.sigma_r)
    return multivariate_normal(cov=cov).logpdf(v).sum()


def test_loglik_matches_vectorized_oracle(design_4311, series_4311):
    got = estimator.loglik(design_4311, series_4311)
    want = _vec_loglik_oracle(design_4311, series_4311)
    assert got == pytest.approx(want, rel=1e-10)


def test_loglik_scale_pairing_invariance(design_4311, series_4311):
    base = estimator.loglik(design_4311, series_4311)
    scaled = dgp.EccMarParams(
        tau=design_4311.tau, gamma=design_4311.gamma,
        phi=design_4311.phi, theta=design_4311.theta,
        sigma_r=3.0 * design_4311.sigma_r, sigma_c=design_4311.sigma_c / 3.0,
    )
    assert estimator.loglik(scaled, series_4311) == pytest.approx(base, rel=1e-12)


def test_whiten_side_residual_covariance(design_4311):
    # at the true parameters the whitened pooled row residuals carry the row
    # covariance exactly (in population); check it in a long sample
    series = dgp.simulate(design_4311, 20_000, seed=99)
    sample = estimator.whiten_side(series, "row", design_4311)
    resid = sample.y - sample.x @ design_4311.gamma @ design_4311.tau.T
    cov = resid.T @ resid / sample.n
    np.testing.assert_allclose(cov, design_4311.sigma_r, atol=0.05)

    sample_c = estimator.whiten_side(series, "column", design_4311)
    resid_c = sample_c.y - sample_c.x @ design_4311.theta @ design_4311.phi.T
    cov_c = resid_c.T @ resid_c / sample_c.n
    np.testing.assert_allclose(cov_c, design_4311.sigma_c, atol=0.05)

    with pytest.raises(DimensionError):
        estimator.whiten_side(series, "diagonal", design_4311)


def test_fit_recovers_truth(design_4311, series_4311):
    fit = estimator.fit_alternating(series_4311, 1, 1)
    assert fit.converged and not fit.safeguard_triggered
    path = np.asarray(fit.loglik_path)
    assert np.all(np.diff(path) >= 0.0)
    # fitted likelihood must weakly dominate the truth
    assert path[-1] >= estimator.loglik(design_4311, series_4311) - 1e-6
    assert matalg.subspace_distance(fit.params.gamma, design_4311.gamma) < 0.1
    assert matalg.subspace_distance(fit.params.theta, design_4311.theta) < 0.1
    # identification normalization: trace(sigma_r) = m
    assert np.trace(fit.params.sigma_r) == pytest.approx(4.0, abs=1e-8)


def test_fit_higher_rank_design(design_4322):
    series = dgp.simulate(design_4322, 800, seed=17)
    fit = estimator.fit_alternating(series, 2, 2)
    assert fit.converged and not fit.safeguard_triggered
    assert matalg.subspace_distance(fit.params.gamma, design_4322.gamma) < 0.15
    assert matalg.subspace_distance(fit.params.theta, design_4322.theta) < 0.15


def test_fit_with_short_run_dynamics(design_4311):
    params = dgp.EccMarParams(
        tau=design_4311.tau, gamma=design_4311.gamma,
        phi=design_4311.phi, theta=design_4311.theta,
        sigma_r=design_4311.sigma_r, sigma_c=design_4311.sigma_c,
        gamma1=[0.3 * np.eye(4)], gamma2=[0.5 * np.eye(3)],
    )
    series = dgp.simulate(params, 1500, seed=33)
    fit = estimator.fit_alternating(series, 1, 1, p=2)
    assert fit.converged and not fit.safeguard_triggered
    assert np.all(np.diff(fit.loglik_path) >= 0.0)
    assert matalg.subspace_distance(fit.params.gamma, params.gamma) < 0.15
    # the short-run Kronecker block is identified only as a product
    got = np.kron(fit.params.gamma2[0], fit.params.gamma1[0])
    want = np.kron(params.gamma2[0], params.gamma1[0])
    np.testing.assert_allclose(got, want, atol=0.15)


def test_user_supplied_initializer(design_4311, series_4311):
    opts = estimator.FitOptions(
        initializer="user_supplied", initial_params=design_4311
    )
    fit = estimator.fit_alternating(series_4311, 1, 1, opts=opts)
    assert fit.converged and not fit.safeguard_triggered
    bad = estimator.FitOptions(initializer="user_supplied", initial_params=design_4311)
    with pytest.raises(DimensionError):
        estimator.fit_alternating(series_4311, 2, 2, opts=bad)


def test_restricted_fit_stays_in_span(series_4311):
    h = np.eye(4)[:, :2]  # confine the row equilibrium matrix to two coordinates
    fit = estimator.fit_alternating(series_4311, 1, 1, restrict_row=h)
    resid = fit.params.gamma - h @ np.linalg.lstsq(h, fit.params.gamma, rcond=None)[0]
    np.testing.assert_allclose(resid, 0.0, atol=1e-10)


def test_implied_vecm_consistency(design_4322):
    pi, beta, alpha = estimator.implied_vecm(design_4322)
    np.testing.assert_allclose(pi, alpha @ beta.T, atol=1e-10)
    m, n, r1, r2 = 4, 3, 2, 2
    r = n * r1 + m * r2 - r1 * r2
    assert matalg.numerical_rank(pi) == r
    assert beta.shape == (m * n, r)
    assert alpha.shape == (m * n, r)


def test_fit_rejects_bad_ranks(series_4311):
    with pytest.raises(DimensionError):
        estimator.fit_alternating(series_4311, 0, 1)
    with pytest.raises(DimensionError):
        estimator.fit_alternating(series_4311, 1, 3)
