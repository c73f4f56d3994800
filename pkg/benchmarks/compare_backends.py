#!/usr/bin/env python3
"""Compare the jitted kernels against the pure-numpy fallback.

Runs the same small workloads in two subprocesses, one with numba enabled
and one with QUASIBOHM_NO_NUMBA=1, and prints wall-clock timings plus the
maximum deviation between the two backends' results.

Usage:  python3 benchmarks/compare_backends.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json
import sys
import time

import numpy as np

from quasibohm import kernels
from quasibohm.cli import build_scenario, preset
from quasibohm.ensemble import evolve_ensemble, stratified_uniform
from quasibohm.trajectory import evolve_cdf, evolve_ode

repeat = int(sys.argv[1])
state, x0, _ = build_scenario(preset("two-mode-box"))
t = np.linspace(0.0, 50.0, 101)

# warm-up pass so jit compilation is not counted
evolve_ode(state, x0, t[:3], drift_samples=0)
evolve_cdf(state, x0, t[:3])
pts = stratified_uniform(64, 0.05, np.pi - 0.05)
evolve_ensemble(state, pts, t[:3], method="CDF")

def bench(fn):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out

results = {"backend": "numba" if kernels.USE_NUMBA else "numpy"}
elapsed, traj = bench(lambda: evolve_ode(state, x0, t, drift_samples=0))
results["ode_trajectory_s"] = elapsed
results["ode_positions"] = traj.positions.tolist()
elapsed, traj = bench(lambda: evolve_cdf(state, x0, t))
results["cdf_transport_s"] = elapsed
results["cdf_positions"] = traj.positions.tolist()
elapsed, run = bench(lambda: evolve_ensemble(state, pts, t, method="CDF"))
results["ensemble_s"] = elapsed
results["ensemble_final"] = run.positions[-1].tolist()
print(json.dumps(results))
"""


def run_backend(disable_numba, repeat):
    env = dict(os.environ)
    if disable_numba:
        env["QUASIBOHM_NO_NUMBA"] = "1"
    else:
        env.pop("QUASIBOHM_NO_NUMBA", None)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat)],
        env=env, capture_output=True, text=True,
    )
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit(proc.returncode)
    return json.loads(proc.stdout.splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3,
                        help="timing repetitions per workload (best is kept)")
    args = parser.parse_args()

    import numpy as np

    jit = run_backend(False, args.repeat)
    plain = run_backend(True, args.repeat)

    workloads = [
        ("guidance ODE, 101 samples to t=50", "ode_trajectory_s", "ode_positions"),
        ("CDF transport, 101 samples", "cdf_transport_s", "cdf_positions"),
        ("64-point ensemble (CDF)", "ensemble_s", "ensemble_final"),
    ]
    print(f"{'workload':<38} {'numba':>10} {'numpy':>10} {'speedup':>8} {'max dev':>10}")
    for label, tkey, vkey in workloads:
        a, b = jit[tkey], plain[tkey]
        dev = float(np.max(np.abs(np.array(jit[vkey]) - np.array(plain[vkey]))))
        print(f"{label:<38} {a:>9.4f}s {b:>9.4f}s {b / a:>7.1f}x {dev:>10.2e}")


if __name__ == "__main__":
    main()
