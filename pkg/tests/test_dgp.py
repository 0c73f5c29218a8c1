import numpy as np
import pytest

from eccmar import dgp, matalg
from eccmar.errors import DimensionError, ProportionalityError


def test_matrix_series_shape_and_vectorized(rng):
    data = rng.standard_normal((10, 4, 3))
    series = dgp.MatrixSeries(data)
    assert (series.T, series.m, series.n) == (10, 4, 3)
    v = series.vectorized()
    assert v.shape == (10, 12)
    # column-stacking: first m entries are the first column
    np.testing.assert_array_equal(v[0, :4], data[0, :, 0])
    np.testing.assert_array_equal(series.transposed().data[3], data[3].T)


def test_params_validation():
    with pytest.raises(DimensionError):
        dgp.EccMarParams(
            tau=np.ones((4, 4)),  # r1 == m not allowed
            gamma=np.ones((4, 4)),
            phi=np.ones((3, 1)),
            theta=np.ones((3, 1)),
            sigma_r=np.eye(4),
            sigma_c=np.eye(3),
        )
    with pytest.raises(DimensionError):
        dgp.EccMarParams(
            tau=np.ones((4, 1)),
            gamma=np.ones((4, 2)),  # mismatched factor shapes
            phi=np.ones((3, 1)),
            theta=np.ones((3, 1)),
            sigma_r=np.eye(4),
            sigma_c=np.eye(3),
        )


def test_level_factors(design_4322):
    np.testing.assert_allclose(
        design_4322.lam,
        np.eye(4) + design_4322.tau @ design_4322.gamma.T,
        atol=1e-14,
    )
    np.testing.assert_allclose(
        design_4322.psi,
        np.eye(3) + design_4322.phi @ design_4322.theta.T,
        atol=1e-14,
    )


def test_draw_design_is_I1():
    for m, n, r1, r2, seed in [(4, 3, 1, 1, 0), (6, 5, 1, 1, 1), (8, 7, 2, 2, 2)]:
        params = dgp.draw_design(m, n, r1, r2, seed=seed)
        report = dgp.check_I1(params)
        assert report["is_I1"]
        # unit-root counts match the cointegration ranks
        unit_l = np.abs(report["eigs_lambda"] - 1.0) < 1e-8
        unit_p = np.abs(report["eigs_psi"] - 1.0) < 1e-8
        assert unit_l.sum() == m - r1
        assert unit_p.sum() == n - r2


def test_draw_design_deterministic():
    a = dgp.draw_design(4, 3, 1, 1, seed=5)
    b = dgp.draw_design(4, 3, 1, 1, seed=5)
    np.testing.assert_array_equal(a.tau, b.tau)
    np.testing.assert_array_equal(a.theta, b.theta)


def test_check_I1_rejects_higher_order(design_4311):
    params = dgp.EccMarParams(
        tau=design_4311.tau,
        gamma=design_4311.gamma,
        phi=design_4311.phi,
        theta=design_4311.theta,
        sigma_r=design_4311.sigma_r,
        sigma_c=design_4311.sigma_c,
        gamma1=[0.1 * np.eye(4)],
        gamma2=[0.1 * np.eye(3)],
    )
    with pytest.raises(DimensionError):
        dgp.check_I1(params)


def test_sample_matrix_normal_covariance(rng):
    sigma_r = np.array([[2.0, 0.5], [0.5, 1.0]])
    sigma_c = np.array([[1.0, -0.3], [-0.3, 2.0]])
    draws = dgp.sample_matrix_normal(sigma_r, sigma_c, rng, size=200_000)
    v = draws.transpose(0, 2, 1).reshape(draws.shape[0], -1)
    cov = np.cov(v.T)
    np.testing.assert_allclose(cov, np.kron(sigma_c, sigma_r), atol=0.03)


def test_simulate_deterministic_and_shapes(design_4311):
    a = dgp.simulate(design_4311, 50, seed=3)
    b = dgp.simulate(design_4311, 50, seed=3)
    np.testing.assert_array_equal(a.data, b.data)
    assert a.data.shape == (50, 4, 3)
    with pytest.raises(DimensionError):
        dgp.simulate(design_4311, 2, seed=0)


def test_noiseless_simulation_obeys_recursion(design_4311):
    series = dgp.simulate(design_4311, 20, seed=0, noiseless=True, burnin=5)
    x = series.data
    for t in range(1, 20):
        np.testing.assert_allclose(
            x[t], design_4311.lam @ x[t - 1] @ design_4311.psi.T, atol=1e-10
        )


def test_equilibrium_directions_are_stationary(design_4311):
    # cointegrating combinations must have bounded variance while raw levels drift
    series = dgp.simulate(design_4311, 3000, seed=21)
    x = series.data
    rows = np.einsum("ij,tjk->tik", design_4311.gamma.T, x)
    cols = np.einsum("tij,jk->tik", x, design_4311.theta)
    halves = lambda arr: (arr[: arr.shape[0] // 2].var(), arr[arr.shape[0] // 2 :].var())
    for comb in (rows, cols):
        v1, v2 = halves(comb)
        assert v2 < 10 * v1 + 1.0  # no explosive variance growth
    lv1, lv2 = halves(x)
    assert lv2 > lv1  # random-walk components keep spreading


def test_impact_matrix_rank(design_4322):
    m, n, r1, r2 = 4, 3, 2, 2
    pi = (
        np.kron(np.eye(n), design_4322.tau @ design_4322.gamma.T)
        + np.kron(design_4322.phi @ design_4322.theta.T, np.eye(m))
        + np.kron(
            design_4322.phi @ design_4322.theta.T,
            design_4322.tau @ design_4322.gamma.T,
        )
    )
    assert matalg.numerical_rank(pi) == n * r1 + m * r2 - r1 * r2


def test_marp_roundtrip(design_4311):
    # lag coefficients proportional across lags, with the weighted-scalar sum
    # s = 1 + 0.3 * 0.2 absorbed so the column factor respects |eig| <= 1/s
    s = 1.0 + 0.3 * 0.2
    lam1, psi1 = design_4311.lam, design_4311.psi / s
    lam2, psi2 = 0.3 * lam1, 0.2 * psi1
    reduced = dgp.marp_reduce([lam1, lam2], [psi1, psi2])
    coefs = dgp.marp_expand(reduced)
    np.testing.assert_allclose(coefs[0], np.kron(psi1, lam1), atol=1e-10)
    np.testing.assert_allclose(coefs[1], np.kron(psi2, lam2), atol=1e-10)


def test_marp_reduce_rejects_explosive_factor(design_4311):
    # both factors carrying unit roots puts the weighted sum outside the
    # admissible region
    lam, psi = design_4311.lam, design_4311.psi
    with pytest.raises(ProportionalityError):
        dgp.marp_reduce([lam, lam], [psi, psi])
