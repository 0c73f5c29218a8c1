"""Command-line interface.

Subcommands: simulate, fit, ranks, test, montecarlo. Every command reads a
key=value config file; --seed and --output override config entries. Exit
codes: 0 success, 2 config error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import inference, io, montecarlo, ranksel
from .dgp import draw_design, simulate
from .errors import ConfigError, DataError, EccmarError
from .estimator import FitOptions, fit_alternating
from .io import FLOAT_FMT


def _listify(x: np.ndarray):
    return np.asarray(x, dtype=float).tolist()


def _parse_matrix(payload: str) -> np.ndarray:
    try:
        rows = [
            [float(v) for v in row.split(",")]
            for row in payload.split(";")
            if row.strip()
        ]
        return np.array(rows)
    except ValueError:
        raise ConfigError(f"bad matrix payload {payload!r}") from None


def _out_dir(config: dict, args) -> Path:
    out = Path(args.output or config.get("output_dir", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(config: dict, args) -> int:
    io.require_keys(config, ["m", "n", "r1", "r2", "T", "seed"], "simulate")
    out = _out_dir(config, args)
    params = draw_design(
        config["m"], config["n"], config["r1"], config["r2"], config["seed"]
    )
    series = simulate(
        params, config["T"], seed=config["seed"] + 1,
        burnin=config.get("burnin", 100),
    )
    io.export_csv(series, out / "dataset.csv")
    with open(out / "params.json", "w") as fh:
        json.dump(
            {
                "m": params.m, "n": params.n, "r1": params.r1, "r2": params.r2,
                "p": params.p, "tau": _listify(params.tau),
                "gamma": _listify(params.gamma), "phi": _listify(params.phi),
                "theta": _listify(params.theta),
                "sigma_r": _listify(params.sigma_r),
                "sigma_c": _listify(params.sigma_c),
            },
            fh, indent=2,
        )
    return 0


def _resolve_ranks(config: dict, series) -> tuple[int, int]:
    if config.get("ranks") == "auto":
        p = config.get("p", 1)
        trace = ranksel.trace_test(series.vectorized(), p)
        decision = ranksel.disambiguate(series, trace["r"], p)
        if decision.selected_pair is None:
            raise EccmarError(
                f"rank selection undecided (outcome {decision.outcome})"
            )
        return decision.selected_pair
    io.require_keys(config, ["r1", "r2"], "fit")
    return config["r1"], config["r2"]


def cmd_fit(config: dict, args) -> int:
    io.require_keys(config, ["dataset"], "fit")
    out = _out_dir(config, args)
    series = io.ingest_csv(config["dataset"])
    r1, r2 = _resolve_ranks(config, series)
    p = config.get("p", 1)
    opts = FitOptions(
        tolerance=config.get("tolerance", 1e-8),
        max_iterations=config.get("max_iterations", 200),
    )
    fit = fit_alternating(series, r1, r2, p, opts)
    params = fit.params

    comps = ranksel.equilibrium_components(series, params.gamma, params.theta)
    adf = {}
    for key, comp in comps.items():
        try:
            adf["_".join(str(k) for k in key)] = ranksel.adf_test(
                comp, lags=config.get("adf_lags", 0)
            )
        except EccmarError as exc:
            adf["_".join(str(k) for k in key)] = {"error": str(exc)}

    with open(out / "fit.json", "w") as fh:
        json.dump(
            {
                "dataset": str(config["dataset"]),
                "m": params.m, "n": params.n, "r1": r1, "r2": r2, "p": p,
                "row_labels": series.row_labels,
                "col_labels": series.col_labels,
                "estimates": {
                    "tau": _listify(params.tau),
                    "gamma": _listify(params.gamma),
                    "phi": _listify(params.phi),
                    "theta": _listify(params.theta),
                    "sigma_r": _listify(params.sigma_r),
                    "sigma_c": _listify(params.sigma_c),
                    "gamma1": [_listify(g) for g in params.gamma1],
                    "gamma2": [_listify(g) for g in params.gamma2],
                },
                "loglik_path": fit.loglik_path,
                "converged": fit.converged,
                "safeguard_triggered": fit.safeguard_triggered,
                "iterations": fit.iterations,
                "implied_beta": _listify(fit.implied_beta),
                "implied_alpha": _listify(fit.implied_alpha),
                "equilibrium_adf": adf,
            },
            fh, indent=2,
        )

    with open(out / "equilibria.csv", "w", newline="") as fh:
        names = ["_".join(str(k) for k in key) for key in comps]
        fh.write(",".join(["time"] + names) + "\n")
        pvals = [
            FLOAT_FMT.format(adf[name]["p_value"]) if "p_value" in adf[name] else ""
            for name in names
        ]
        fh.write(",".join(["adf_p"] + pvals) + "\n")
        values = np.column_stack(list(comps.values()))
        for t in range(values.shape[0]):
            fh.write(
                ",".join([str(t)] + [FLOAT_FMT.format(v) for v in values[t]]) + "\n"
            )
    return 0


def cmd_ranks(config: dict, args) -> int:
    io.require_keys(config, ["dataset"], "ranks")
    out = _out_dir(config, args)
    series = io.ingest_csv(config["dataset"])
    p = config.get("p", 1)
    crit = None
    if "critical_values" in config:
        crit = ranksel.load_critical_values(config["critical_values"])
    if "r" in config:
        trace = None
        r_hat = config["r"]
    else:
        trace = ranksel.trace_test(series.vectorized(), p, critical_values=crit)
        r_hat = trace["r"]
    decision = ranksel.disambiguate(
        series, r_hat, p, level=config.get("alpha_level", 0.05),
        adf_lags=config.get("adf_lags", 0),
    )
    with open(out / "ranks.json", "w") as fh:
        json.dump(
            {
                "r_hat": decision.r_hat,
                "admissible": [list(pair) for pair in decision.admissible],
                "outcome": decision.outcome,
                "selected_pair": (
                    list(decision.selected_pair) if decision.selected_pair else None
                ),
                "trace": (
                    [
                        {
                            "rank": row["rank"],
                            "stat": row["stat"],
                            "critical_5pct": row["critical_5pct"],
                            "reject": row["reject"],
                        }
                        for row in trace["per_rank"]
                    ]
                    if trace
                    else None
                ),
            },
            fh, indent=2,
        )
    return 0


def cmd_test(config: dict, args) -> int:
    out = _out_dir(config, args)
    if "fit" in config:
        with open(config["fit"]) as fh:
            fit_doc = json.load(fh)
        dataset = fit_doc["dataset"]
        r1, r2, p = fit_doc["r1"], fit_doc["r2"], fit_doc["p"]
    else:
        io.require_keys(config, ["dataset", "r1", "r2"], "test")
        dataset = config["dataset"]
        r1, r2, p = config["r1"], config["r2"], config.get("p", 1)
    io.require_keys(config, ["side", "kind"], "test")
    series = io.ingest_csv(dataset)
    fit = fit_alternating(series, r1, r2, p)

    side, kind = config["side"], config["kind"]
    results = []
    if kind == "weak_exogeneity":
        payload = config.get("payload", "all")
        d = fit.row_context.d if side == "row" else fit.col_context.d
        indices = range(d) if payload == "all" else [int(payload)]
        for idx in indices:
            res = inference.weak_exogeneity(fit, side, idx)
            results.append((f"row_index_{idx}", res))
    else:
        io.require_keys(config, ["payload"], "test")
        payload = config["payload"]
        matrix = (
            np.loadtxt(payload, delimiter=",", ndmin=2)
            if os.path.exists(payload)
            else _parse_matrix(payload)
        )
        if kind == "uniform":
            res = inference.lr_uniform(fit, side, matrix)
        elif kind == "known_vector":
            res = inference.lr_known_vectors(fit, side, matrix)
        elif kind == "adjustment":
            res = inference.lr_adjustment(fit, side, matrix)
        else:
            raise ConfigError(f"unknown test kind {kind!r}")
        results.append((kind, res))

    with open(out / "tests.json", "w") as fh:
        json.dump(
            [
                {
                    "label": label,
                    "side": res.side,
                    "kind": res.kind,
                    "statistic": res.statistic,
                    "df": res.df,
                    "p_value": res.p_value,
                }
                for label, res in results
            ],
            fh, indent=2,
        )
    return 0


def cmd_montecarlo(config: dict, args) -> int:
    io.require_keys(config, ["study", "replications", "seed"], "montecarlo")
    out = _out_dir(config, args)
    study = config["study"]
    reps = config["replications"]
    if reps < 1:
        raise ConfigError("replications must be at least 1")
    seed = config["seed"]
    threads = args.threads
    sizes = [int(s) for s in config.get("sizes", "1000").split(",")]
    if study == "estimation":
        designs = _parse_designs(config.get("designs", "4,3,1,1;6,5,1,1"))
        rows = montecarlo.run_estimation_study(designs, sizes, reps, seed, threads)
        montecarlo.write_distances(rows, out / "distances.csv")
    elif study == "rank_id":
        designs = _parse_designs(config.get("designs", "4,3,2,2;8,7,2,2"))
        rows = montecarlo.run_rank_id_study(designs, sizes, reps, seed, threads)
        montecarlo.write_frequencies(rows, out / "frequencies.csv")
    elif study == "test_size_power":
        names = None
        if "restrictions" in config:
            names = [s.strip() for s in config["restrictions"].split(",")]
            unknown = [s for s in names if s not in montecarlo.TEST_BATTERY]
            if unknown:
                raise ConfigError(f"unknown restriction name(s): {unknown}")
        rows = montecarlo.run_test_study(
            sizes, reps, seed, names=names,
            level=config.get("alpha_level", 0.05), threads=threads,
        )
        montecarlo.write_rejections(rows, out / "rejections.csv")
    else:
        raise ConfigError(f"unknown study {study!r}")
    return 0


def _parse_designs(text: str):
    designs = []
    for part in text.split(";"):
        vals = [int(v) for v in part.split(",")]
        if len(vals) != 4:
            raise ConfigError(f"design {part!r} must be m,n,r1,r2")
        m, n, r1, r2 = vals
        if not (0 < r1 < m and 0 < r2 < n):
            raise ConfigError(f"invalid design tuple {part!r}")
        designs.append(tuple(vals))
    return designs


COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "ranks": cmd_ranks,
    "test": cmd_test,
    "montecarlo": cmd_montecarlo,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="eccmar",
        description="Cointegrated matrix autoregressions: simulation, "
        "estimation, rank identification, and inference.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="key=value config file")
        p.add_argument("--output", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument(
            "--threads", type=int,
            default=int(os.environ.get("ECMAR_THREADS", "1")),
        )
    args = parser.parse_args(argv)
    try:
        config = io.parse_config(args.config)
        if args.seed is not None:
            config["seed"] = args.seed
        return COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (EccmarError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
