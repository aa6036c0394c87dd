"""Timing comparison of the jitted pool-adjacent-violators kernel against the
pure NumPy/Python fallback.

Run from the repository root::

    python3 benchmarks/bench_kernels.py

The script re-runs itself in two subprocesses, one per code path (the path is
chosen at import time via ``MESOC_KIT_NO_NUMBA``), checks that both paths
produce bit-identical projections, and prints a speedup table.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

SIZES = [(1_000, 8), (10_000, 8), (10_000, 64), (100_000, 16)]
SEED = 20240817


def measure() -> dict:
    from mesoc_kit import _kernels
    from mesoc_kit.projections import project_monotone_nonneg_batch

    _kernels.warmup()
    rows = []
    for n, dim in SIZES:
        V = np.random.default_rng(SEED).standard_normal((n, dim))
        project_monotone_nonneg_batch(V)  # warm the call path
        reps = 0
        t0 = time.perf_counter()
        while True:
            out = project_monotone_nonneg_batch(V)
            reps += 1
            elapsed = time.perf_counter() - t0
            if elapsed > 0.4 and reps >= 3:
                break
        rows.append(
            {
                "n": n,
                "dim": dim,
                "seconds": elapsed / reps,
                "checksum": float(out.sum()),
            }
        )
    return {"jit": _kernels.HAS_NUMBA, "rows": rows}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--measure", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.measure:
        print(json.dumps(measure()))
        return 0

    results = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, MESOC_KIT_NO_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--measure"],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        results[label] = json.loads(proc.stdout.strip().splitlines()[-1])

    if not results["numba"]["jit"]:
        print("note: numba is not importable here; both columns use the fallback")

    print(f"{'rows x dim':>14} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for fast, slow in zip(results["numba"]["rows"], results["numpy"]["rows"]):
        if fast["checksum"] != slow["checksum"]:
            raise SystemExit("the two code paths disagree — benchmark aborted")
        shape = f"{fast['n']}x{fast['dim']}"
        ratio = slow["seconds"] / fast["seconds"]
        print(
            f"{shape:>14} {fast['seconds'] * 1e3:>10.2f}ms {slow['seconds'] * 1e3:>10.2f}ms"
            f" {ratio:>8.1f}x"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
