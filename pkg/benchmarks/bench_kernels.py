"""Timing comparison of the jitted kernels against the pure-Python fallback.

Runs each workload twice in subprocesses: once on the default (numba) path
and once with LOGIQ_NO_NUMBA=1. Usage: python benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys

WORKLOADS = {
    "integrate_logistic": """
import numpy as np, time
from logiq.fluid import QueueSpec, SolverOptions, integrate_queue
from logiq.series import RateSeries
rng = np.random.default_rng(0)
inflow = RateSeries(0.0, 60.0, rng.uniform(0.0, 2e7, 360))
spec = QueueSpec(mu=1.133e7, alpha=5e-8)
integrate_queue(inflow, spec)  # warmup / compile
t0 = time.perf_counter()
for _ in range(REPS):
    integrate_queue(inflow, spec)
print((time.perf_counter() - t0) / REPS)
""",
    "integrate_priority": """
import numpy as np, time
from logiq.fluid import integrate_priority_pair
from logiq.series import RateSeries
rng = np.random.default_rng(1)
x1 = RateSeries(0.0, 60.0, rng.uniform(0.0, 6e6, 360))
x2 = RateSeries(0.0, 60.0, rng.uniform(0.0, 1.2e7, 360))
integrate_priority_pair(x1, x2, 1.5e7, alpha=5e-8)
t0 = time.perf_counter()
for _ in range(REPS):
    integrate_priority_pair(x1, x2, 1.5e7, alpha=5e-8)
print((time.perf_counter() - t0) / REPS)
""",
    "point_queue_exact": """
import numpy as np, time
from logiq.fluid import integrate_point_queue
from logiq.series import RateSeries
rng = np.random.default_rng(2)
inflow = RateSeries(0.0, 1.0, rng.uniform(0.0, 2.0, 5000))
integrate_point_queue(inflow, 0.9)
t0 = time.perf_counter()
for _ in range(REPS):
    integrate_point_queue(inflow, 0.9)
print((time.perf_counter() - t0) / REPS)
""",
    "des_fifo": """
import numpy as np, time
from logiq.des import DesConfig, simulate_fifo
from logiq.series import PacketTrace
rng = np.random.default_rng(3)
n = 200000
times = np.sort(rng.uniform(0.0, 3600.0, n))
sizes = np.full(n, 11712.0)
trace = PacketTrace(times, sizes, (0.0, 3600.0))
cfg = DesConfig(mu=8e5, sample_dt=60.0)
simulate_fifo(trace, cfg)
t0 = time.perf_counter()
for _ in range(REPS):
    simulate_fifo(trace, cfg)
print((time.perf_counter() - t0) / REPS)
""",
}

REPS = {"integrate_logistic": 20, "integrate_priority": 10,
        "point_queue_exact": 20, "des_fifo": 5}


def run(code, reps, no_numba):
    env = dict(os.environ)
    if no_numba:
        env["LOGIQ_NO_NUMBA"] = "1"
    else:
        env.pop("LOGIQ_NO_NUMBA", None)
    out = subprocess.run([sys.executable, "-c", f"REPS = {reps}\n" + code],
                         env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main():
    results = {}
    print(f"{'kernel':<22} {'numba':>12} {'fallback':>12} {'speedup':>9}")
    for name, code in WORKLOADS.items():
        t_jit = run(code, REPS[name], no_numba=False)
        t_py = run(code, REPS[name], no_numba=True)
        results[name] = {"numba_s": t_jit, "fallback_s": t_py,
                         "speedup": t_py / t_jit}
        print(f"{name:<22} {t_jit:>10.3e} s {t_py:>10.3e} s "
              f"{t_py / t_jit:>8.1f}x")
    out_path = os.path.join(os.path.dirname(__file__), "results.json")
    with open(out_path, "w") as fh:
        json.dump(results, fh, indent=2)
    print(f"written {out_path}")


if __name__ == "__main__":
    main()
