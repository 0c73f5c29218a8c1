"""Benchmark the compiled simulation kernel against the NumPy fallback.

Run with ``python3 benchmarks/bench_simulate.py``. The fallback is timed in
a subprocess with ECMAR_NO_EXT=1 so both paths go through the normal import
selection.
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = """
import json, sys, time
import numpy as np
from eccmar import dgp
from eccmar._kernels import KERNEL_BACKEND

spec = json.loads(sys.argv[1])
params = dgp.draw_design(spec["m"], spec["n"], spec["r1"], spec["r2"], seed=7)
# warm-up
dgp.simulate(params, spec["T"], seed=1)
times = []
for rep in range(spec["repeats"]):
    start = time.perf_counter()
    dgp.simulate(params, spec["T"], seed=rep)
    times.append(time.perf_counter() - start)
print(json.dumps({"backend": KERNEL_BACKEND, "best": min(times)}))
"""


def run_backend(spec, force_python):
    env = dict(os.environ)
    if force_python:
        env["ECMAR_NO_EXT"] = "1"
    else:
        env.pop("ECMAR_NO_EXT", None)
    out = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps(spec)],
        capture_output=True, text=True, check=True, env=env,
    )
    return json.loads(out.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    cases = [
        {"m": 4, "n": 3, "r1": 1, "r2": 1, "T": 10_000},
        {"m": 8, "n": 7, "r1": 2, "r2": 2, "T": 10_000},
        {"m": 20, "n": 15, "r1": 3, "r2": 3, "T": 5_000},
    ]
    print(f"{'design':>12} {'T':>7} {'compiled':>10} {'numpy':>10} {'speedup':>8}")
    for case in cases:
        spec = dict(case, repeats=args.repeats)
        fast = run_backend(spec, force_python=False)
        slow = run_backend(spec, force_python=True)
        name = f"{case['m']}x{case['n']}"
        tag = "" if fast["backend"] == "cython" else "  (no extension!)"
        print(
            f"{name:>12} {case['T']:>7} {fast['best']:>9.4f}s {slow['best']:>9.4f}s "
            f"{slow['best'] / fast['best']:>7.2f}x{tag}"
        )


if __name__ == "__main__":
    main()
