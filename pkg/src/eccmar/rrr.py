"""Gaussian reduced-rank regression engine over pooled observations.

The Johansen eigenvalue machinery: Frisch-Waugh partialling, pooled moment
matrices, the symmetric-definite generalized eigenvalue step with Cholesky
reduction, and recovery of adjustment and short-run coefficients. With a
pooled column count of 1 this is the textbook vector procedure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, NotPositiveDefiniteError, RankDeficientError

PD_FLOOR = 1e-13


@dataclass
class PooledSample:
    """Pooled observations: rows of y/x/z are individual (t, j) draws."""

    y: np.ndarray  # N x d_y
    x: np.ndarray  # N x d_x
    z: np.ndarray | None = None  # N x d_z

    def __post_init__(self):
        self.y = np.atleast_2d(np.asarray(self.y, float))
        self.x = np.atleast_2d(np.asarray(self.x, float))
        if self.z is not None:
            self.z = np.atleast_2d(np.asarray(self.z, float))
            if self.z.shape[0] != self.y.shape[0]:
                raise DimensionError("z length differs from y")
        if self.x.shape[0] != self.y.shape[0]:
            raise DimensionError("x length differs from y")

    @property
    def n(self) -> int:
        return self.y.shape[0]


@dataclass
class PooledMoments:
    """Cross-product matrices of the concentrated pooled regression."""

    s00: np.ndarray
    s01: np.ndarray
    s10: np.ndarray
    s11: np.ndarray
    n: int


@dataclass
class RrrSolution:
    eigenvalues: np.ndarray  # descending, all of them (length d_x)
    vectors: np.ndarray  # d_x x d_x generalized eigenvectors, s11-orthonormal
    gamma_hat: np.ndarray  # d_x x r
    tau_hat: np.ndarray  # d_y x r

    @property
    def loglik_terms(self) -> np.ndarray:
        return np.log(1.0 - self.eigenvalues)


def partial_out(sample: PooledSample) -> tuple[np.ndarray, np.ndarray]:
    """Residuals of y and x after pooled least squares on z (Frisch-Waugh).

    With z absent this is the identity map.
    """
    if sample.z is None or sample.z.shape[1] == 0:
        return sample.y.copy(), sample.x.copy()
    z = sample.z
    mzz = z.T @ z
    try:
        coef_y = np.linalg.solve(mzz, z.T @ sample.y)
        coef_x = np.linalg.solve(mzz, z.T @ sample.x)
    except np.linalg.LinAlgError:
        # Collinear (or identically zero) short-run regressors: fall back to
        # the minimum-norm least-squares projection.
        coef_y = np.linalg.lstsq(z, sample.y, rcond=None)[0]
        coef_x = np.linalg.lstsq(z, sample.x, rcond=None)[0]
    return sample.y - z @ coef_y, sample.x - z @ coef_x


def pooled_moments(r0: np.ndarray, r1: np.ndarray) -> PooledMoments:
    """Averaged outer products over the pooled index, 1/N scaling."""
    r0 = np.atleast_2d(np.asarray(r0, float))
    r1 = np.atleast_2d(np.asarray(r1, float))
    n = r0.shape[0]
    if n == 0:
        raise DimensionError("empty pooled sample")
    if r1.shape[0] != n:
        raise DimensionError("pooled lengths differ")
    s00 = r0.T @ r0 / n
    s11 = r1.T @ r1 / n
    s01 = r0.T @ r1 / n
    return PooledMoments(s00=s00, s01=s01, s10=s01.T.copy(), s11=s11, n=n)


def _chol_lower(a: np.ndarray, label: str) -> np.ndarray:
    a = 0.5 * (a + a.T)
    floor = PD_FLOOR * max(np.trace(a) / a.shape[0], 1.0)
    w = np.linalg.eigvalsh(a)
    if w[0] <= floor:
        raise NotPositiveDefiniteError(
            f"{label} below positive-definiteness floor (min eig {w[0]:.3e})"
        )
    return np.linalg.cholesky(a)


def eigen_pair(mom: PooledMoments) -> tuple[np.ndarray, np.ndarray]:
    """Solve |lambda s11 - s10 s00^{-1} s01| = 0 via Cholesky reduction.

    Returns (eigenvalues descending in [0, 1), eigenvectors v with
    v' s11 v = I). The Cholesky route guarantees real nonnegative
    eigenvalues.
    """
    l11 = _chol_lower(mom.s11, "levels moment matrix s11")
    l00 = _chol_lower(mom.s00, "dependents moment matrix s00")
    # B = L11^{-1} s10 s00^{-1} s01 L11^{-T}, symmetric PSD
    w = scipy.linalg.solve_triangular(l00, mom.s01, lower=True)  # L00^{-1} s01
    g = scipy.linalg.solve_triangular(l11, w.T @ w, lower=True)
    b = scipy.linalg.solve_triangular(l11, g.T, lower=True)
    b = 0.5 * (b + b.T)
    vals, vecs = np.linalg.eigh(b)
    order = np.argsort(vals)[::-1]
    vals = np.clip(vals[order], 0.0, 1.0 - 1e-14)
    vecs = scipy.linalg.solve_triangular(l11, vecs[:, order], lower=True, trans="T")
    # Deterministic sign: largest-magnitude entry of each column positive.
    for k in range(vecs.shape[1]):
        idx = np.argmax(np.abs(vecs[:, k]))
        if vecs[idx, k] < 0:
            vecs[:, k] = -vecs[:, k]
    return vals, vecs


def solve_rrr(mom: PooledMoments, r: int) -> RrrSolution:
    """Rank-r reduced-rank regression from pooled moments.

    gamma_hat is the leading r generalized eigenvectors under the
    normalization gamma' s11 gamma = I; tau_hat the implied adjustment.
    """
    d_x = mom.s11.shape[0]
    if not 0 <= r <= d_x:
        raise DimensionError(f"rank {r} out of range for dimension {d_x}")
    vals, vecs = eigen_pair(mom)
    gamma_hat = vecs[:, :r]
    tau_hat = adjustment_from(mom, gamma_hat)
    return RrrSolution(
        eigenvalues=vals, vectors=vecs, gamma_hat=gamma_hat, tau_hat=tau_hat
    )


def adjustment_from(mom: PooledMoments, gamma_hat: np.ndarray) -> np.ndarray:
    """Maximum-likelihood adjustment s01 gamma (gamma' s11 gamma)^{-1}."""
    gamma_hat = np.atleast_2d(np.asarray(gamma_hat, float))
    if gamma_hat.shape[1] == 0:
        return np.zeros((mom.s00.shape[0], 0))
    g = gamma_hat.T @ mom.s11 @ gamma_hat
    try:
        return np.linalg.solve(g.T, (mom.s01 @ gamma_hat).T).T
    except np.linalg.LinAlgError as exc:
        raise RankDeficientError(f"singular gamma' s11 gamma: {exc}") from exc


def shortrun_from(
    sample: PooledSample, tau_hat: np.ndarray, gamma_hat: np.ndarray
) -> np.ndarray:
    """Pooled short-run coefficient (M_yz - tau gamma' M_xz) M_zz^{-1}."""
    if sample.z is None or sample.z.shape[1] == 0:
        raise DimensionError("no short-run regressors present")
    n = sample.n
    myz = sample.y.T @ sample.z / n
    mxz = sample.x.T @ sample.z / n
    mzz = sample.z.T @ sample.z / n
    rhs = myz - tau_hat @ gamma_hat.T @ mxz
    try:
        return np.linalg.solve(mzz.T, rhs.T).T
    except np.linalg.LinAlgError:
        return (np.linalg.pinv(mzz) @ rhs.T).T


def renormalize_leading_block(gamma_hat: np.ndarray) -> np.ndarray:
    """Re-normalize so the leading r x r block is the identity.

    Raises when that block is singular; the s11-normalized canonical form
    remains the internal representation.
    """
    gamma_hat = np.atleast_2d(np.asarray(gamma_hat, float))
    r = gamma_hat.shape[1]
    block = gamma_hat[:r, :]
    try:
        return np.linalg.solve(block.T, gamma_hat.T).T
    except np.linalg.LinAlgError as exc:
        raise RankDeficientError(f"singular leading block: {exc}") from exc
