import numpy as np
import pytest
from statsmodels.tsa.stattools import adfuller

from eccmar import dgp, ranksel
from eccmar.errors import DataError, DimensionError


def test_admissible_pairs_brute_force():
    for m, n in [(4, 3), (8, 7), (5, 5)]:
        for r in range(1, m * n):
            want = [
                (r1, r2)
                for r1 in range(1, m)
                for r2 in range(1, n)
                if n * r1 + m * r2 - r1 * r2 == r
            ]
            assert ranksel.admissible_pairs(m, n, r) == want
    with pytest.raises(DimensionError):
        ranksel.admissible_pairs(4, 3, 0)
    with pytest.raises(DimensionError):
        ranksel.admissible_pairs(4, 3, 12)


def test_known_ambiguous_counts():
    # the designs used in the rank-identification study
    assert len(ranksel.admissible_pairs(4, 3, 10)) == 2
    assert len(ranksel.admissible_pairs(8, 7, 26)) == 2


def test_adf_matches_statsmodels(rng):
    y = np.cumsum(rng.standard_normal(300))
    stationary = rng.standard_normal(300)
    for series, lags in [(y, 0), (y, 2), (stationary, 0), (stationary, 3)]:
        got = ranksel.adf_test(series, lags=lags)
        stat_ref, p_ref, *_ = adfuller(
            series, maxlag=lags, autolag=None, regression="n"
        )
        assert got["stat"] == pytest.approx(stat_ref, abs=1e-8)
        # interpolated asymptotic table vs MacKinnon response surface
        assert got["p_value"] == pytest.approx(p_ref, abs=0.05)


def test_adf_input_validation():
    with pytest.raises(DimensionError):
        ranksel.adf_test(np.ones(100))  # zero-variance level
    with pytest.raises(DimensionError):
        ranksel.adf_test(np.arange(5.0), lags=10)


def test_trace_test_on_cointegrated_system(rng):
    # 3-dim system with cointegration rank 2
    alpha = np.array([[-0.5, 0.0], [0.0, -0.4], [0.2, 0.1]])
    beta = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    x = np.zeros((1501, 3))
    for t in range(1, 1501):
        x[t] = x[t - 1] + alpha @ (beta.T @ x[t - 1]) + rng.standard_normal(3)
    out = ranksel.trace_test(x)
    assert out["r"] == 2
    assert len(out["per_rank"]) == 3
    stats = [row["stat"] for row in out["per_rank"]]
    assert np.all(np.diff(stats) < 0)  # trace statistics decrease in the null rank


def test_trace_test_full_iid_system(rng):
    x = rng.standard_normal((800, 2))  # stationary: full rank expected
    assert ranksel.trace_test(x)["r"] == 2


def test_trace_test_needs_critical_values(rng):
    wide = rng.standard_normal((300, 15))
    with pytest.raises(Exception):
        ranksel.trace_test(wide)
    custom = {d: 1e6 for d in range(1, 16)}
    out = ranksel.trace_test(wide, critical_values=custom)
    assert out["r"] == 0  # absurdly high thresholds never reject


def test_load_critical_values(tmp_path):
    path = tmp_path / "cv.csv"
    path.write_text(
        "dimension,level,value\n1,0.05,4.13\n2,0.05,12.32\n1,0.01,6.94\n"
    )
    table = ranksel.load_critical_values(path)
    assert table == {1: 4.13, 2: 12.32}
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(DataError):
        ranksel.load_critical_values(bad)
    empty = tmp_path / "empty.csv"
    empty.write_text("dimension,level,value\n1,0.10,2.0\n")
    with pytest.raises(DataError):
        ranksel.load_critical_values(empty)


def test_bic_var_order(rng):
    # VAR(2) data: BIC should not pick order 0 or the maximum by default
    a1 = np.array([[0.5, 0.1], [0.0, 0.4]])
    a2 = np.array([[0.3, 0.0], [0.1, 0.2]])
    x = np.zeros((1002, 2))
    for t in range(2, 1002):
        x[t] = a1 @ x[t - 1] + a2 @ x[t - 2] + rng.standard_normal(2)
    out = ranksel.bic_var_order(x[2:], max_p=5)
    assert out["order"] == 2
    assert len(out["bic"]) == 6
    with pytest.raises(DimensionError):
        ranksel.bic_var_order(x[:4], max_p=10)


def test_equilibrium_components(design_4311, series_4311):
    comps = ranksel.equilibrium_components(
        series_4311, design_4311.gamma, design_4311.theta
    )
    # r1 * n row combinations plus m * r2 column combinations
    assert len(comps) == 1 * 3 + 4 * 1
    for key, comp in comps.items():
        assert key[0] in ("row", "column")
        assert comp.shape == (500,)


def test_disambiguate_unique_pair(series_4311):
    # (4, 3, r=6) admits only (1, 1)
    decision = ranksel.disambiguate(series_4311, 6)
    assert decision.outcome == "unique"
    assert decision.selected_pair == (1, 1)


def test_disambiguate_ambiguous_rank(design_4322):
    # (4, 3, r=10) admits (2, 2) and (3, 1); the fitted equilibria of the
    # true pair should be stationary at T = 1000
    series = dgp.simulate(design_4322, 1000, seed=55)
    decision = ranksel.disambiguate(series, 10)
    assert decision.admissible == [(2, 2), (3, 1)]
    assert decision.outcome in ("selected", "undefined_both", "undefined_none")
    if decision.outcome == "selected":
        assert decision.selected_pair in decision.admissible
    assert set(decision.adf_reports) <= {(2, 2), (3, 1)}


def test_disambiguate_rejects_impossible_rank(series_4311):
    with pytest.raises(DimensionError):
        ranksel.disambiguate(series_4311, 7)  # no (r1, r2) yields 7 for (4, 3)
