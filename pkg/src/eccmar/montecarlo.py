"""Monte Carlo harness: estimation accuracy, rank identification, and
test size/power studies, with deterministic per-replication seeding.

Seeds are derived from (master seed, study tag, design index, sample size,
replication index) through a seed sequence, so serial and parallel runs
agree replication by replication.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import inference, matalg, ranksel, rrr
from .dgp import EccMarParams, MatrixSeries, draw_design, simulate
from .errors import EccmarError
from .estimator import fit_alternating, implied_vecm
from .io import FLOAT_FMT

_STUDY_TAGS = {"estimation": 0, "rank_id": 1, "test_size_power": 2}


def derive_seed(master: int, *indices: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=(int(master),) + tuple(int(i) for i in indices))


def cvar_beta(series: MatrixSeries, r: int, p: int = 1) -> np.ndarray:
    """Unrestricted vectorized benchmark: rank-r regression of the
    differenced vector system on its lagged levels."""
    vec = series.vectorized()
    dy = np.diff(vec, axis=0)
    y = dy[p - 1 :]
    x = vec[p - 1 : -1]
    z = None
    if p > 1:
        z = np.concatenate([dy[p - 1 - i : -i] for i in range(1, p)], axis=1)
    r0, r1_resid = rrr.partial_out(rrr.PooledSample(y=y, x=x, z=z))
    mom = rrr.pooled_moments(r0, r1_resid)
    return rrr.solve_rrr(mom, r).gamma_hat


def true_beta(params: EccMarParams) -> np.ndarray:
    return implied_vecm(params)[1]


def _estimation_rep(args):
    master, d_idx, design, t, rep = args
    m, n, r1, r2 = design
    params = draw_design(m, n, r1, r2, derive_seed(master, 0, d_idx, rep, 0))
    series = simulate(params, t, derive_seed(master, 0, d_idx, rep, 1, t))
    beta_t = true_beta(params)
    r = n * r1 + m * r2 - r1 * r2
    try:
        fit = fit_alternating(series, r1, r2)
        d_ecc = matalg.subspace_distance(fit.implied_beta, beta_t)
        monotone = all(
            b >= a for a, b in zip(fit.loglik_path, fit.loglik_path[1:])
        )
        safeguard = fit.safeguard_triggered
    except EccmarError:
        d_ecc, monotone, safeguard = float("nan"), False, True
    d_cvar = matalg.subspace_distance(cvar_beta(series, r), beta_t)
    return (design, t, rep, d_ecc, d_cvar, monotone, safeguard)


def run_estimation_study(
    designs, sizes, replications: int, master_seed: int, threads: int = 1
):
    """Distance-to-truth comparison of the matrix estimator vs the
    vectorized benchmark on matched simulated data."""
    tasks = [
        (master_seed, d_idx, tuple(design), t, rep)
        for d_idx, design in enumerate(designs)
        for t in sizes
        for rep in range(replications)
    ]
    results = _run(tasks, _estimation_rep, threads)
    rows = []
    for design, t, rep, d_ecc, d_cvar, monotone, safeguard in results:
        name = "x".join(str(v) for v in design)
        rows.append((name, t, "eccmar", rep, d_ecc, monotone, safeguard))
        rows.append((name, t, "cvar", rep, d_cvar, True, False))
    return rows


def write_distances(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["design", "T", "method", "replication", "subspace_distance"]
        )
        for name, t, method, rep, dist, *_ in rows:
            writer.writerow([name, t, method, rep, FLOAT_FMT.format(dist)])


def _rank_id_rep(args):
    master, d_idx, design, t, rep = args
    m, n, r1, r2 = design
    params = draw_design(m, n, r1, r2, derive_seed(master, 1, d_idx, rep, 0))
    series = simulate(params, t, derive_seed(master, 1, d_idx, rep, 1, t))
    r = n * r1 + m * r2 - r1 * r2
    decision = ranksel.disambiguate(series, r)
    if decision.outcome in ("unique", "selected"):
        label = (
            "correct" if decision.selected_pair == (r1, r2) else "wrong"
        )
    elif decision.outcome == "undefined_both":
        label = "undefined_both"
    else:
        label = "undefined_none"
    return (design, t, rep, label)


def run_rank_id_study(
    designs, sizes, replications: int, master_seed: int, threads: int = 1
):
    """Rank-pair identification frequencies with the vectorized rank known."""
    tasks = [
        (master_seed, d_idx, tuple(design), t, rep)
        for d_idx, design in enumerate(designs)
        for t in sizes
        for rep in range(replications)
    ]
    results = _run(tasks, _rank_id_rep, threads)
    tallies: dict = {}
    for design, t, rep, label in results:
        key = ("x".join(str(v) for v in design), t)
        tallies.setdefault(key, {}).setdefault(label, 0)
        tallies[key][label] += 1
    rows = []
    for (name, t), counts in sorted(tallies.items()):
        total = sum(counts.values())
        for label in ("correct", "wrong", "undefined_both", "undefined_none"):
            c = counts.get(label, 0)
            rows.append((name, t, label, c, c / total))
    return rows


def write_frequencies(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["design", "T", "outcome", "count", "frequency"])
        for name, t, label, count, freq in rows:
            writer.writerow([name, t, label, count, FLOAT_FMT.format(freq)])


def fixed_test_design() -> EccMarParams:
    """The fixed 4 x 3 rank-(2, 2) design used by the size/power study."""
    tau = np.array([[0.0, 0.0], [0.0, 0.0], [-0.5, 0.0], [0.0, -0.5]])
    gamma = np.array([[-1.0, 0.0], [1.0, -0.5], [0.5, -0.5], [0.0, 1.0]])
    phi = np.array([[0.0, 0.0], [-0.2, 0.0], [0.0, -0.2]])
    theta = np.array([[-1.0, -0.5], [1.0, 0.5], [0.0, 1.0]])
    return EccMarParams(
        tau=tau, gamma=gamma, phi=phi, theta=theta,
        sigma_r=np.eye(4), sigma_c=np.eye(3),
    )


def _null_space_design(rows: np.ndarray) -> np.ndarray:
    """Design matrix H whose span is the null space of the given rows, so
    that rows @ candidate = 0 is equivalent to candidate = H c."""
    return matalg.orth_complement(np.atleast_2d(rows).T)


TEST_BATTERY = {
    # name: (side, kind, payload builder)
    "tau_row1_zero": ("row", "weak_exogeneity", 0),
    "theta_sum_110": ("column", "uniform", np.array([1.0, 1.0, 0.0])),
    "gamma_member": (
        "row", "known_vector", np.array([[0.0], [-0.5], [-0.5], [1.0]])
    ),
    "tau_row3_zero": ("row", "weak_exogeneity", 2),
    "theta_sum_115": ("column", "uniform", np.array([1.0, 1.5, 0.0])),
    "theta_sum_111": ("column", "uniform", np.array([1.0, 1.1, 0.0])),
    "theta_sum_113": ("column", "uniform", np.array([1.0, 1.3, 0.0])),
    "gamma_member_06": (
        "row", "known_vector", np.array([[0.0], [-0.5], [-0.6], [1.0]])
    ),
    "gamma_member_10": (
        "row", "known_vector", np.array([[0.0], [-0.5], [-1.0], [1.0]])
    ),
}
SIZE_TESTS = ["tau_row1_zero", "theta_sum_110", "gamma_member"]
POWER_TESTS = ["tau_row3_zero", "theta_sum_115"]


def run_single_test(fit, name: str) -> float:
    """p-value of one named battery test on a converged fit."""
    side, kind, payload = TEST_BATTERY[name]
    if kind == "weak_exogeneity":
        return inference.weak_exogeneity(fit, side, payload).p_value
    if kind == "uniform":
        return inference.lr_uniform(fit, side, _null_space_design(payload)).p_value
    return inference.lr_known_vectors(fit, side, payload).p_value


def _test_rep(args):
    master, t, rep, names = args
    params = fixed_test_design()
    series = simulate(params, t, derive_seed(master, 2, rep, 1, t))
    out = {}
    try:
        fit = fit_alternating(series, 2, 2)
    except EccmarError:
        return (t, rep, {name: None for name in names})
    for name in names:
        try:
            out[name] = run_single_test(fit, name)
        except EccmarError:
            out[name] = None
    return (t, rep, out)


def run_test_study(
    sizes, replications: int, master_seed: int,
    names=None, level: float = 0.05, threads: int = 1,
):
    """Rejection frequencies of the restriction tests on the fixed design."""
    names = list(names) if names is not None else SIZE_TESTS + POWER_TESTS
    tasks = [
        (master_seed, t, rep, tuple(names))
        for t in sizes
        for rep in range(replications)
    ]
    results = _run(tasks, _test_rep, threads)
    tallies: dict = {}
    for t, rep, pvals in results:
        for name in names:
            rej, tot = tallies.setdefault((name, t), [0, 0])
            p = pvals.get(name)
            tallies[(name, t)][1] += 1
            if p is not None and p < level:
                tallies[(name, t)][0] += 1
    rows = []
    for (name, t), (rej, tot) in sorted(tallies.items()):
        rows.append((name, t, tot, rej, rej / tot))
    return rows


def write_rejections(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["hypothesis", "T", "replications", "rejections", "frequency"]
        )
        for name, t, tot, rej, freq in rows:
            writer.writerow([name, t, tot, rej, FLOAT_FMT.format(freq)])


def _run(tasks, worker, threads: int):
    if threads <= 1:
        return [worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, tasks))
