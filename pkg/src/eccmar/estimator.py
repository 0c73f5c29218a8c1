"""Alternating maximum likelihood for the error-correction matrix model.

Each outer iteration whitens one side of the model with the other side's
current parameters, solves a pooled reduced-rank regression, and evaluates
the system Gaussian log-likelihood. A safeguard reverts the last update if
the likelihood decreases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matalg, rrr
from .dgp import EccMarParams, MatrixSeries
from .errors import (
    DimensionError,
    EstimationError,
    NotPositiveDefiniteError,
)


@dataclass
class FitOptions:
    tolerance: float = 1e-8  # absolute log-likelihood change
    max_iterations: int = 200
    initializer: str = "representative_column"  # or "user_supplied"
    initial_params: EccMarParams | None = None

    def __post_init__(self):
        if self.tolerance <= 0:
            raise DimensionError("tolerance must be positive")
        if self.max_iterations < 1:
            raise DimensionError("max_iterations must be at least 1")
        if self.initializer not in ("representative_column", "user_supplied"):
            raise DimensionError(f"unknown initializer {self.initializer!r}")
        if self.initializer == "user_supplied" and self.initial_params is None:
            raise DimensionError("user_supplied initializer needs initial_params")


@dataclass
class SideContext:
    """Converged pooled regression state of one side, consumed by the tests."""

    side: str  # "row" or "column"
    r0: np.ndarray  # N x d concentrated dependents
    r1: np.ndarray  # N x d concentrated levels
    moments: rrr.PooledMoments
    eigenvalues: np.ndarray
    rank: int

    @property
    def d(self) -> int:
        return self.r1.shape[1]

    @property
    def n_pooled(self) -> int:
        return self.moments.n


@dataclass
class FitResult:
    params: EccMarParams
    loglik_path: list[float]
    converged: bool
    safeguard_triggered: bool
    implied_pi: np.ndarray
    implied_beta: np.ndarray
    implied_alpha: np.ndarray
    row_context: SideContext
    col_context: SideContext
    iterations: int = 0

    @property
    def loglik(self) -> float:
        return self.loglik_path[-1]


def loglik(params: EccMarParams, series: MatrixSeries) -> float:
    """System Gaussian log-likelihood, conditioning on the first p levels."""
    m, n, p = params.m, params.n, params.p
    if series.m != m or series.n != n:
        raise DimensionError("parameter and series dimensions differ")
    x = series.data
    diffs = np.diff(x, axis=0)  # diffs[t-1] = x[t] - x[t-1]
    lam, psi = params.lam, params.psi
    mean = np.einsum("ik,tkl,jl->tij", lam, x[p - 1 : -1], psi) - x[p - 1 : -1]
    for i, (g1, g2) in enumerate(zip(params.gamma1, params.gamma2), start=1):
        mean += np.einsum("ik,tkl,jl->tij", g1, diffs[p - 1 - i : -i], g2)
    resid = diffs[p - 1 :] - mean
    t0 = resid.shape[0]

    sr = 0.5 * (params.sigma_r + params.sigma_r.T)
    sc = 0.5 * (params.sigma_c + params.sigma_c.T)
    sign_r, logdet_r = np.linalg.slogdet(sr)
    sign_c, logdet_c = np.linalg.slogdet(sc)
    if sign_r <= 0 or sign_c <= 0:
        raise NotPositiveDefiniteError("covariance factor is not positive definite")
    sr_inv = matalg.solve_spd(sr, np.eye(m))
    sc_inv = matalg.solve_spd(sc, np.eye(n))
    quad = np.einsum("ij,tjk,kl,til->", sr_inv, resid, sc_inv, resid)
    return float(
        -0.5 * t0 * m * n * np.log(2.0 * np.pi)
        - 0.5 * t0 * n * logdet_r
        - 0.5 * t0 * m * logdet_c
        - 0.5 * quad
    )


def _pool_columns(mats: np.ndarray) -> np.ndarray:
    """(T0, d, q) stack of matrices -> (T0*q, d) pooled column observations."""
    return mats.transpose(0, 2, 1).reshape(-1, mats.shape[1])


def whiten_side(
    series: MatrixSeries,
    side: str,
    params: EccMarParams,
) -> rrr.PooledSample:
    """Build the pooled whitened sample that isolates one side's level terms.

    Row side: subtract the column error-correction term from the
    differences, regress on the levels propagated through the column
    factor (I + theta phi'), and right-whiten everything with
    sigma_c^{-1/2}; the whitened noise columns are then iid with row
    covariance sigma_r, so the pooled problem is an exact conditional
    reduced-rank regression (the alternation ascends the system
    likelihood). The column side is the transposed mirror using
    (I + tau gamma') and sigma_r^{-1/2}. Short-run regressors are
    transformed by the opposite side's current blocks and stacked.
    """
    p = params.p
    x = series.data
    if series.T < p + 2:
        raise DimensionError("series too short for the requested order")
    diffs = np.diff(x, axis=0)
    if side == "row":
        w = matalg.inv_sqrt_sym(params.sigma_c)  # n x n
        ec_col = x[p - 1 : -1] @ params.theta @ params.phi.T
        y = (diffs[p - 1 :] - ec_col) @ w
        lv = (x[p - 1 : -1] + ec_col) @ w
        zparts = [
            diffs[p - 1 - i : -i] @ g2.T @ w
            for i, g2 in enumerate(params.gamma2, start=1)
        ]
    elif side == "column":
        w = matalg.inv_sqrt_sym(params.sigma_r)  # m x m
        ec_row = np.einsum(
            "ik,tkl->til", params.tau @ params.gamma.T, x[p - 1 : -1]
        )
        y = np.transpose(diffs[p - 1 :] - ec_row, (0, 2, 1)) @ w
        lv = np.transpose(x[p - 1 : -1] + ec_row, (0, 2, 1)) @ w
        zparts = [
            np.transpose(diffs[p - 1 - i : -i], (0, 2, 1)) @ g1.T @ w
            for i, g1 in enumerate(params.gamma1, start=1)
        ]
    else:
        raise DimensionError(f"unknown side {side!r}")
    z = None
    if zparts:
        z = np.concatenate([_pool_columns(zp) for zp in zparts], axis=1)
    return rrr.PooledSample(y=_pool_columns(y), x=_pool_columns(lv), z=z)


def _side_update(sample: rrr.PooledSample, r: int, restrict: np.ndarray | None):
    """Concentrated pooled RRR for one side; returns the full update tuple."""
    r0, r1_resid = rrr.partial_out(sample)
    mom = rrr.pooled_moments(r0, r1_resid)
    if restrict is None:
        sol = rrr.solve_rrr(mom, r)
        coint, adj = sol.gamma_hat, sol.tau_hat
        eigenvalues = sol.eigenvalues
    else:
        h = np.atleast_2d(np.asarray(restrict, float))
        sub = rrr.PooledMoments(
            s00=mom.s00, s01=mom.s01 @ h, s10=h.T @ mom.s10,
            s11=h.T @ mom.s11 @ h, n=mom.n,
        )
        vals, vecs = rrr.eigen_pair(sub)
        coint = h @ vecs[:, :r]
        adj = rrr.adjustment_from(mom, coint)
        eigenvalues = vals
    sigma = mom.s00 - adj @ coint.T @ mom.s10
    shortrun = None
    if sample.z is not None and sample.z.shape[1] > 0:
        shortrun = rrr.shortrun_from(sample, adj, coint)
    return coint, adj, sigma, shortrun, mom, eigenvalues, r0, r1_resid


def _slice_blocks(stacked: np.ndarray | None, d: int, count: int) -> list:
    if stacked is None or count == 0:
        return []
    return [stacked[:, i * d : (i + 1) * d].copy() for i in range(count)]


def initialize(series: MatrixSeries, r1: int, r2: int, p: int) -> EccMarParams:
    """Warm start for the column side from a pooled vector fit over all rows.

    The transposed series is treated as a pooled collection of n-dimensional
    column problems (no whitening, identity covariance), and a rank-r2
    pooled reduced-rank regression supplies (phi0, theta0). Short-run blocks
    start at zero; sigma_c0 is the trace-normalized pooled residual
    covariance. The row side starts at matching neutral values and is
    overwritten by the first row update.
    """
    m, n = series.m, series.n
    x = series.data
    diffs = np.diff(x, axis=0)
    y = _pool_columns(np.transpose(diffs[p - 1 :], (0, 2, 1)))
    lv = _pool_columns(np.transpose(x[p - 1 : -1], (0, 2, 1)))
    z = None
    if p > 1:
        zparts = [
            _pool_columns(np.transpose(diffs[p - 1 - i : -i], (0, 2, 1)))
            for i in range(1, p)
        ]
        z = np.concatenate(zparts, axis=1)
    sample = rrr.PooledSample(y=y, x=lv, z=z)
    r0, r1_resid = rrr.partial_out(sample)
    mom = rrr.pooled_moments(r0, r1_resid)
    sol = rrr.solve_rrr(mom, r2)
    theta0, phi0 = sol.gamma_hat, sol.tau_hat
    sigma_c0 = mom.s00 - phi0 @ theta0.T @ mom.s10
    sigma_c0 *= n / np.trace(sigma_c0)
    # Warm-start the column short-run blocks from the pooled coefficient so
    # the first row update sees nonzero short-run regressors.
    gamma2_0 = [np.zeros((n, n)) for _ in range(p - 1)]
    if p > 1:
        stacked = rrr.shortrun_from(sample, phi0, theta0)
        gamma2_0 = _slice_blocks(stacked, n, p - 1)

    # Neutral row side: orthonormal placeholders, identity covariance.
    tau0 = np.eye(m)[:, :r1]
    gamma0 = np.eye(m)[:, :r1] * 0.0
    gamma0[:r1, :] = np.eye(r1) * 1e-8  # near-zero level term, full column rank
    return EccMarParams(
        tau=tau0, gamma=gamma0, phi=phi0, theta=theta0,
        sigma_r=np.eye(m), sigma_c=sigma_c0,
        gamma1=[np.zeros((m, m)) for _ in range(p - 1)],
        gamma2=gamma2_0,
    )


def implied_vecm(params: EccMarParams):
    """Level-impact matrix of the vectorized system and its factorization.

    Returns (pi, beta, alpha) with pi = alpha beta' of reduced rank
    n r1 + m r2 - r1 r2.
    """
    m, n = params.m, params.n
    pg = params.tau @ params.gamma.T
    pt = params.phi @ params.theta.T
    pi = (
        matalg.kron(np.eye(n), pg)
        + matalg.kron(pt, np.eye(m))
        + matalg.kron(pt, pg)
    )
    gamma_perp = matalg.orth_complement(params.gamma)
    gamma_bar = params.gamma @ np.linalg.inv(params.gamma.T @ params.gamma)
    beta = np.concatenate(
        [matalg.kron(np.eye(n), params.gamma), matalg.kron(params.theta, gamma_perp)],
        axis=1,
    )
    alpha = np.concatenate(
        [
            matalg.kron(np.eye(n), params.tau)
            + matalg.kron(pt, gamma_bar + params.tau),
            matalg.kron(params.phi, gamma_perp),
        ],
        axis=1,
    )
    return pi, beta, alpha


def fit_alternating(
    series: MatrixSeries,
    r1: int,
    r2: int,
    p: int = 1,
    opts: FitOptions | None = None,
    restrict_row: np.ndarray | None = None,
    restrict_col: np.ndarray | None = None,
) -> FitResult:
    """Alternating maximum-likelihood fit at fixed ranks (r1, r2).

    ``restrict_row``/``restrict_col`` confine the corresponding cointegration
    matrix to a design-matrix span throughout the alternation (used by the
    re-alternated variant of the restriction tests).
    """
    opts = opts or FitOptions()
    m, n = series.m, series.n
    if not (0 < r1 < m and 0 < r2 < n):
        raise DimensionError(f"invalid rank pair {(r1, r2)} for dims {(m, n)}")
    if series.T < p + m + n:
        raise DimensionError("series too short for alternating estimation")

    if opts.initializer == "user_supplied":
        params = opts.initial_params
        if (params.m, params.n, params.r1, params.r2, params.p) != (m, n, r1, r2, p):
            raise DimensionError("initial_params inconsistent with requested fit")
    else:
        try:
            params = initialize(series, r1, r2, p)
        except NotPositiveDefiniteError as exc:
            raise EstimationError(f"initializer failed: {exc}") from exc

    loglik_path: list[float] = []
    converged = False
    safeguard = False
    prev_params = params
    it = 0
    for it in range(1, opts.max_iterations + 1):
        try:
            row_sample = whiten_side(series, "row", params)
            gam_hat, tau_hat, sigma_r, sr_short, *_ = _side_update(
                row_sample, r1, restrict_row
            )
            # Fix the free covariance scale: trace(sigma_r) = m, pushed to sigma_c.
            scale = m / np.trace(sigma_r)
            sigma_r = sigma_r * scale
            sigma_c_carry = params.sigma_c / scale
            trial = EccMarParams(
                tau=tau_hat, gamma=gam_hat, phi=params.phi, theta=params.theta,
                sigma_r=sigma_r, sigma_c=sigma_c_carry,
                gamma1=_slice_blocks(sr_short, m, p - 1),
                gamma2=[g.copy() for g in params.gamma2],
            )
            col_sample = whiten_side(series, "column", trial)
            theta_hat, phi_hat, sigma_c, sc_short, *_ = _side_update(
                col_sample, r2, restrict_col
            )
            params = EccMarParams(
                tau=trial.tau, gamma=trial.gamma, phi=phi_hat, theta=theta_hat,
                sigma_r=trial.sigma_r, sigma_c=sigma_c,
                gamma1=[g.copy() for g in trial.gamma1],
                gamma2=_slice_blocks(sc_short, n, p - 1),
            )
            ll = loglik(params, series)
        except NotPositiveDefiniteError as exc:
            raise EstimationError(f"iteration {it}, numerical failure: {exc}") from exc
        if loglik_path and abs(ll - loglik_path[-1]) < opts.tolerance:
            # Sub-tolerance changes count as convergence even when slightly
            # negative; larger decreases trip the safeguard below.
            if ll >= loglik_path[-1]:
                loglik_path.append(ll)
                prev_params = params
            else:
                params = prev_params
            converged = True
            break
        if loglik_path and ll < loglik_path[-1]:
            params = prev_params
            safeguard = True
            break
        loglik_path.append(ll)
        prev_params = params

    # Final contexts at the accepted parameters, for downstream inference.
    try:
        row_sample = whiten_side(series, "row", params)
        r0_l, r1_l = rrr.partial_out(row_sample)
        mom_l = rrr.pooled_moments(r0_l, r1_l)
        vals_l, _ = rrr.eigen_pair(mom_l)
        col_sample = whiten_side(series, "column", params)
        r0_r, r1_r = rrr.partial_out(col_sample)
        mom_r = rrr.pooled_moments(r0_r, r1_r)
        vals_r, _ = rrr.eigen_pair(mom_r)
    except NotPositiveDefiniteError as exc:
        raise EstimationError(f"post-fit context failed: {exc}") from exc

    pi, beta, alpha = implied_vecm(params)
    return FitResult(
        params=params,
        loglik_path=loglik_path,
        converged=converged,
        safeguard_triggered=safeguard,
        implied_pi=pi,
        implied_beta=beta,
        implied_alpha=alpha,
        row_context=SideContext(
            side="row", r0=r0_l, r1=r1_l, moments=mom_l, eigenvalues=vals_l, rank=r1
        ),
        col_context=SideContext(
            side="column", r0=r0_r, r1=r1_r, moments=mom_r, eigenvalues=vals_r, rank=r2
        ),
        iterations=it,
    )
