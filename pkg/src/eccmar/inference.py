"""Likelihood-ratio tests on cointegration and adjustment matrices.

Three test classes on either side of the fitted model: uniform restrictions
on a cointegration matrix, membership of known vectors in a cointegration
space, and restrictions on an adjustment matrix (weak exogeneity as the
zero-row special case). All tests are conditional on the converged
opposite-side parameters; a re-alternated variant is available for uniform
restrictions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.special

from . import matalg, rrr
from .errors import DimensionError
from .estimator import FitResult, SideContext

STAT_CLAMP = 1e-8


@dataclass
class TestResult:
    statistic: float
    df: int
    p_value: float
    restricted_eigenvalues: np.ndarray
    unrestricted_eigenvalues: np.ndarray
    side: str
    kind: str = ""
    auxiliary_eigenvalues: np.ndarray = field(default=None)


def chi2_sf(x: float, df: int) -> float:
    """Upper-tail chi-square probability via the regularized incomplete gamma."""
    if x < 0:
        raise DimensionError("statistic must be nonnegative")
    if df == 0:
        return 1.0 if x == 0.0 else 0.0
    return float(scipy.special.gammaincc(df / 2.0, x / 2.0))


def _context(fit: FitResult, side: str) -> SideContext:
    if side == "row":
        return fit.row_context
    if side == "column":
        return fit.col_context
    raise DimensionError(f"unknown side {side!r}")


def _clamp(stat: float) -> float:
    if -STAT_CLAMP <= stat < 0.0:
        return 0.0
    if stat < -STAT_CLAMP:
        raise DimensionError(f"negative likelihood-ratio statistic {stat:.3e}")
    return stat


def _restricted_eigs(mom: rrr.PooledMoments, h: np.ndarray) -> np.ndarray:
    sub = rrr.PooledMoments(
        s00=mom.s00, s01=mom.s01 @ h, s10=h.T @ mom.s10,
        s11=h.T @ mom.s11 @ h, n=mom.n,
    )
    vals, _ = rrr.eigen_pair(sub)
    return vals


def _fw_residuals(dep: np.ndarray, cond: np.ndarray) -> np.ndarray:
    """Residuals of dep on cond over the pooled index; identity if cond empty."""
    if cond.shape[1] == 0:
        return dep.copy()
    coef = np.linalg.lstsq(cond, dep, rcond=None)[0]
    return dep - cond @ coef


def lr_uniform(
    fit: FitResult,
    side: str,
    h: np.ndarray,
    realternate: bool = False,
    series=None,
) -> TestResult:
    """Test of a design-matrix restriction on a cointegration matrix.

    Null: the side's cointegration matrix lies in span(h) with h of shape
    d x s. Asymptotically chi-square with r (d - s) degrees of freedom.
    When ``realternate`` is set (requires the fitted series), the restricted
    model is re-estimated by a constrained alternating fit instead of
    conditioning on the converged opposite side.
    """
    ctx = _context(fit, side)
    h = np.atleast_2d(np.asarray(h, float))
    d, s = h.shape
    if d != ctx.d:
        raise DimensionError(f"design matrix rows {d} != side dimension {ctx.d}")
    if not ctx.rank <= s <= d:
        raise DimensionError(f"design columns {s} outside [{ctx.rank}, {d}]")
    r = ctx.rank
    unres = ctx.eigenvalues
    if realternate:
        from .estimator import fit_alternating

        if series is None:
            raise DimensionError("realternate variant needs the fitted series")
        kwargs = {"restrict_row": h} if side == "row" else {"restrict_col": h}
        refit = fit_alternating(
            series, fit.params.r1, fit.params.r2, fit.params.p, **kwargs
        )
        res = _restricted_eigs(_context(refit, side).moments, h)
    else:
        res = _restricted_eigs(ctx.moments, h)
    stat = ctx.n_pooled * (
        np.sum(np.log(1.0 - res[:r])) - np.sum(np.log(1.0 - unres[:r]))
    )
    stat = _clamp(float(stat))
    df = r * (d - s)
    return TestResult(
        statistic=stat, df=df, p_value=chi2_sf(stat, df),
        restricted_eigenvalues=res, unrestricted_eigenvalues=unres,
        side=side, kind="uniform",
    )


def lr_known_vectors(fit: FitResult, side: str, known: np.ndarray) -> TestResult:
    """Test whether known directions belong to a cointegration space.

    Null: the d x r_g matrix ``known`` spans part of the side's
    cointegration space (r_g <= r). Asymptotically chi-square with
    (d - r) r_g degrees of freedom.
    """
    ctx = _context(fit, side)
    g = np.atleast_2d(np.asarray(known, float))
    d, r_g = g.shape
    if d != ctx.d:
        raise DimensionError(f"known-vector rows {d} != side dimension {ctx.d}")
    if r_g > ctx.rank:
        raise DimensionError(f"more known vectors ({r_g}) than rank {ctx.rank}")
    r = ctx.rank
    n = ctx.n_pooled
    mom = ctx.moments
    unres = ctx.eigenvalues

    # Auxiliary eigenproblem for the known directions:
    # |rho s00 - s01 g (g' s11 g)^{-1} g' s10| = 0.
    aux = rrr.PooledMoments(
        s00=g.T @ mom.s11 @ g, s01=g.T @ mom.s10,
        s10=mom.s01 @ g, s11=mom.s00, n=n,
    )
    rho, _ = rrr.eigen_pair(aux)

    # Concentrate the stationary combinations g' r1 out of both blocks.
    g_perp = matalg.orth_complement(g)
    cond = ctx.r1 @ g
    r0g = _fw_residuals(ctx.r0, cond)
    r1g = _fw_residuals(ctx.r1 @ g_perp, cond)
    momg = rrr.pooled_moments(r0g, r1g)
    res, _ = rrr.eigen_pair(momg)

    stat = n * (
        np.sum(np.log(1.0 - rho[:r_g]))
        + np.sum(np.log(1.0 - res[: r - r_g]))
        - np.sum(np.log(1.0 - unres[:r]))
    )
    stat = _clamp(float(stat))
    df = (d - r) * r_g
    return TestResult(
        statistic=stat, df=df, p_value=chi2_sf(stat, df),
        restricted_eigenvalues=res, unrestricted_eigenvalues=unres,
        side=side, kind="known_vector", auxiliary_eigenvalues=rho,
    )


def lr_adjustment(fit: FitResult, side: str, h: np.ndarray) -> TestResult:
    """Test of a design-matrix restriction on an adjustment matrix.

    Null: the side's adjustment matrix lies in span(h) with h of shape
    d x s, s >= r. Asymptotically chi-square with r (d - s) degrees of
    freedom; zero-row restrictions correspond to weak exogeneity.
    """
    ctx = _context(fit, side)
    h = np.atleast_2d(np.asarray(h, float))
    d, s = h.shape
    if d != ctx.d:
        raise DimensionError(f"design matrix rows {d} != side dimension {ctx.d}")
    if s < ctx.rank:
        raise DimensionError(
            f"restricted adjustment space ({s}) smaller than rank {ctx.rank}"
        )
    r = ctx.rank
    n = ctx.n_pooled
    unres = ctx.eigenvalues

    # Condition the kept dependents on the annihilated block, then
    # concentrate that block out of dependents and levels.
    h_perp = matalg.orth_complement(h)
    cond = ctx.r0 @ h_perp
    r0h = _fw_residuals(ctx.r0 @ h, cond)
    r1h = _fw_residuals(ctx.r1, cond)
    momh = rrr.pooled_moments(r0h, r1h)
    res, _ = rrr.eigen_pair(momh)

    stat = n * (
        np.sum(np.log(1.0 - res[:r])) - np.sum(np.log(1.0 - unres[:r]))
    )
    stat = _clamp(float(stat))
    df = r * (d - s)
    return TestResult(
        statistic=stat, df=df, p_value=chi2_sf(stat, df),
        restricted_eigenvalues=res, unrestricted_eigenvalues=unres,
        side=side, kind="adjustment",
    )


def weak_exogeneity(fit: FitResult, side: str, row_index: int) -> TestResult:
    """Zero-row adjustment test for one variable (row of tau or phi)."""
    ctx = _context(fit, side)
    if not 0 <= row_index < ctx.d:
        raise DimensionError(f"row index {row_index} out of range for {ctx.d}")
    h = np.delete(np.eye(ctx.d), row_index, axis=1)
    result = lr_adjustment(fit, side, h)
    result.kind = "weak_exogeneity"
    return result
