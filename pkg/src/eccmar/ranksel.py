"""Cointegration-rank determination.

Vectorized trace test, enumeration of admissible structural rank pairs,
unit-root screening of estimated equilibrium series, plus the supporting
Dickey-Fuller test and BIC lag-order selection. All tests use the
no-deterministics specification.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import rrr
from .dgp import MatrixSeries
from .errors import DataError, DimensionError, EccmarError

# Asymptotic quantiles of the Dickey-Fuller t-ratio distribution for the
# specification without deterministic terms; linear interpolation between
# grid points, p-values clipped to [0.001, 0.999] outside.
DF_PROBS = np.array([0.01, 0.025, 0.05, 0.10, 0.50, 0.90, 0.95, 0.975, 0.99])
DF_QUANTILES = np.array([-2.58, -2.23, -1.95, -1.62, -0.50, 0.89, 1.28, 1.62, 2.00])
DF_P_CLIP = (0.001, 0.999)

# 5% trace-test critical values by remaining system dimension (1..12).
TRACE_CRIT_5PCT = {
    1: 3.8415, 2: 15.4948, 3: 29.7976, 4: 47.8564, 5: 69.8187, 6: 95.7541,
    7: 125.6154, 8: 159.5297, 9: 197.3709, 10: 239.2354, 11: 285.1427,
    12: 334.9837,
}


@dataclass
class RankDecision:
    r_hat: int
    admissible: list
    outcome: str  # unique | selected | undefined_both | undefined_none
    selected_pair: tuple | None
    adf_reports: dict = field(default_factory=dict)


def admissible_pairs(m: int, n: int, r: int) -> list[tuple[int, int]]:
    """All (r1, r2) with 0 < r1 < m, 0 < r2 < n and n r1 + m r2 - r1 r2 = r."""
    if not 0 < r < m * n:
        raise DimensionError(f"rank {r} outside (0, {m * n})")
    out = []
    for r1 in range(1, m):
        for r2 in range(1, n):
            if n * r1 + m * r2 - r1 * r2 == r:
                out.append((r1, r2))
    return out


def adf_test(y: np.ndarray, lags: int = 0) -> dict:
    """Dickey-Fuller unit-root t-test without deterministic terms.

    Regresses dy_t on y_{t-1} and ``lags`` lagged differences; the reported
    p-value interpolates the embedded asymptotic quantile table.
    """
    y = np.asarray(y, dtype=float).ravel()
    t = y.size
    if t <= lags + 10:
        raise DimensionError(f"series of length {t} too short for {lags} lags")
    dy = np.diff(y)
    rows = []
    dep = dy[lags:]
    rows.append(y[lags:-1])
    for i in range(1, lags + 1):
        rows.append(dy[lags - i : -i])
    x = np.column_stack(rows)
    if np.allclose(x[:, 0], x[0, 0]):
        raise DimensionError("constant level regressor (zero-variance series)")
    xtx = x.T @ x
    try:
        coef = np.linalg.solve(xtx, x.T @ dep)
    except np.linalg.LinAlgError as exc:
        raise DimensionError(f"singular regressor matrix: {exc}") from exc
    resid = dep - x @ coef
    dof = dep.size - x.shape[1]
    sigma2 = float(resid @ resid) / dof
    se = np.sqrt(sigma2 * np.linalg.inv(xtx)[0, 0])
    stat = float(coef[0] / se)
    p = float(np.interp(stat, DF_QUANTILES, DF_PROBS))
    p = min(max(p, DF_P_CLIP[0]), DF_P_CLIP[1])
    return {"stat": stat, "p_value": p}


def load_critical_values(path) -> dict[int, float]:
    """Load 5% trace critical values from a CSV (dimension, level, value)."""
    table = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {
            "dimension", "level", "value",
        } <= set(reader.fieldnames):
            raise DataError("critical-value CSV needs columns dimension,level,value")
        for line in reader:
            if abs(float(line["level"]) - 0.05) < 1e-12:
                table[int(line["dimension"])] = float(line["value"])
    if not table:
        raise DataError("no 5% entries found in critical-value table")
    return table


def trace_test(
    vec_series: np.ndarray,
    p: int = 1,
    critical_values: dict[int, float] | None = None,
) -> dict:
    """Johansen trace test on a k-dimensional vector series.

    Fits the differenced system with p - 1 lagged differences via the
    pooled machinery (pooled count 1), computes the trace statistic for
    each null rank, and decides r as the first null not rejected at 5%.
    """
    vec_series = np.atleast_2d(np.asarray(vec_series, float))
    t, k = vec_series.shape
    crit = dict(TRACE_CRIT_5PCT)
    if critical_values:
        crit.update(critical_values)
    if any(k - i not in crit for i in range(k)):
        raise EccmarError(
            f"no 5% critical values for dimension {k}; supply a table"
        )
    dy = np.diff(vec_series, axis=0)
    y = dy[p - 1 :]
    x = vec_series[p - 1 : -1]
    z = None
    if p > 1:
        z = np.concatenate([dy[p - 1 - i : -i] for i in range(1, p)], axis=1)
    r0, r1_resid = rrr.partial_out(rrr.PooledSample(y=y, x=x, z=z))
    mom = rrr.pooled_moments(r0, r1_resid)
    vals, _ = rrr.eigen_pair(mom)
    n = mom.n
    per_rank = []
    decided = k
    for i in range(k):
        stat = float(-n * np.sum(np.log(1.0 - vals[i:])))
        cv = crit[k - i]
        reject = stat > cv
        per_rank.append(
            {"rank": i, "stat": stat, "critical_5pct": cv, "reject": reject}
        )
        if not reject and decided == k:
            decided = i
    return {"per_rank": per_rank, "r": decided, "eigenvalues": vals}


def bic_var_order(vec_series: np.ndarray, max_p: int) -> dict:
    """Select a VAR order in levels by BIC over a common estimation sample."""
    vec_series = np.atleast_2d(np.asarray(vec_series, float))
    t, k = vec_series.shape
    if max_p < 0:
        raise DimensionError("max_p must be nonnegative")
    t_eff = t - max_p
    if t_eff <= max_p * k + 1:
        raise DimensionError(f"series of length {t} too short for order {max_p}")
    dep = vec_series[max_p:]
    bics = []
    for order in range(max_p + 1):
        if order == 0:
            resid = dep
        else:
            x = np.concatenate(
                [vec_series[max_p - i : t - i] for i in range(1, order + 1)], axis=1
            )
            coef = np.linalg.lstsq(x, dep, rcond=None)[0]
            resid = dep - x @ coef
        sigma = resid.T @ resid / t_eff
        sign, logdet = np.linalg.slogdet(sigma)
        if sign <= 0:
            bics.append(np.inf)
            continue
        ll = -0.5 * t_eff * (k * np.log(2.0 * np.pi) + logdet + k)
        n_par = order * k * k
        bics.append(float(-2.0 * ll + n_par * np.log(t_eff)))
    order = int(np.argmin(bics))
    return {"order": order, "bic": bics}


def equilibrium_components(series: MatrixSeries, gamma, theta) -> dict:
    """Scalar component series of the two estimated equilibrium processes."""
    gamma = np.atleast_2d(np.asarray(gamma, float))
    theta = np.atleast_2d(np.asarray(theta, float))
    row_eq = np.einsum("ki,tkj->tij", gamma, series.data)  # (T, r1, n)
    col_eq = series.data @ theta  # (T, m, r2)
    comps = {}
    for i in range(row_eq.shape[1]):
        for j in range(row_eq.shape[2]):
            comps[("row", i, j)] = row_eq[:, i, j]
    for i in range(col_eq.shape[1]):
        for j in range(col_eq.shape[2]):
            comps[("column", i, j)] = col_eq[:, i, j]
    return comps


def disambiguate(
    series: MatrixSeries,
    r_hat: int,
    p: int = 1,
    level: float = 0.05,
    adf_lags: int = 0,
) -> RankDecision:
    """Resolve the structural rank pair for a given vectorized rank.

    With a single admissible pair the decision is immediate. Otherwise each
    candidate is estimated and a candidate passes when every component of
    both estimated equilibrium series rejects the unit root at ``level``;
    estimation failures count as non-passes.
    """
    from .estimator import fit_alternating

    pairs = admissible_pairs(series.m, series.n, r_hat)
    if not pairs:
        raise DimensionError(
            f"no admissible rank pairs for (m, n, r) = {(series.m, series.n, r_hat)}"
        )
    if len(pairs) == 1:
        return RankDecision(
            r_hat=r_hat, admissible=pairs, outcome="unique", selected_pair=pairs[0]
        )
    reports = {}
    passing = []
    for pair in pairs:
        r1, r2 = pair
        try:
            fit = fit_alternating(series, r1, r2, p)
        except EccmarError as exc:
            reports[pair] = {"error": str(exc)}
            continue
        comps = equilibrium_components(series, fit.params.gamma, fit.params.theta)
        comp_reports = {}
        ok = True
        for key, comp in comps.items():
            try:
                res = adf_test(comp, lags=adf_lags)
            except EccmarError as exc:
                res = {"stat": np.nan, "p_value": 1.0, "error": str(exc)}
            comp_reports[key] = res
            if res["p_value"] >= level:
                ok = False
        reports[pair] = comp_reports
        if ok:
            passing.append(pair)
    if len(passing) == 1:
        outcome, selected = "selected", passing[0]
    elif not passing:
        outcome, selected = "undefined_none", None
    else:
        outcome, selected = "undefined_both", None
    return RankDecision(
        r_hat=r_hat, admissible=pairs, outcome=outcome,
        selected_pair=selected, adf_reports=reports,
    )
