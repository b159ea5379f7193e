#!/usr/bin/env python3
"""Benchmark the compiled integration kernels against the pure-Python twin.

Times the three kernel entry points on the bundled default parameters and
prints per-step cost plus the speedup.  Also asserts the two backends agree
bit for bit, which is the contract that makes the fallback safe.

Usage: python benchmarks/bench_kernels.py [n_steps]
"""

import sys
import timeit

import numpy as np

from carbonlab import _kernels_py
from carbonlab.model import BASELINE

try:
    from carbonlab import _kernels
except ImportError:
    _kernels = None

X0 = np.array([130.0, 0.121, 1003.0, 80.0])


def _time(fn, repeats):
    best = min(timeit.repeat(fn, number=1, repeat=repeats))
    return best


def main() -> int:
    n_steps = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
    dt = 0.05
    q = BASELINE.as_array()

    if _kernels is None:
        print("compiled kernel not built; only the python backend is available")

    backends = [("python", _kernels_py)] + ([("c", _kernels)] if _kernels else [])
    cases = {
        "rk4_path": lambda mod: mod.rk4_path(
            q, X0, n_steps, dt, np.empty((n_steps + 1, 4))
        ),
        "rk4_final": lambda mod: mod.rk4_final(q, X0, n_steps, dt),
        "steady_state_run": lambda mod: mod.steady_state_run(q, X0, dt, 1e-12, n_steps),
    }

    if _kernels is not None:
        out_c = np.empty((n_steps + 1, 4))
        out_p = np.empty((n_steps + 1, 4))
        meta_c = _kernels.rk4_path(q, X0, n_steps, dt, out_c)
        meta_p = _kernels_py.rk4_path(q, X0, n_steps, dt, out_p)
        assert tuple(meta_c) == tuple(meta_p) and np.array_equal(out_c, out_p), \
            "backends disagree; the fallback contract is broken"
        assert _kernels.rk4_final(q, X0, n_steps, dt) == _kernels_py.rk4_final(
            q, X0, n_steps, dt
        )
        print(f"backends bit-identical over {n_steps} steps\n")

    print(f"{'kernel':<18}{'backend':<9}{'ns/step':>10}{'total s':>10}")
    totals = {}
    for name, case in cases.items():
        for backend_name, mod in backends:
            repeats = 3 if backend_name == "python" else 10
            seconds = _time(lambda: case(mod), repeats)
            totals[(name, backend_name)] = seconds
            print(f"{name:<18}{backend_name:<9}{seconds / n_steps * 1e9:>10.1f}{seconds:>10.4f}")
    if _kernels is not None:
        print()
        for name in cases:
            speedup = totals[(name, "python")] / totals[(name, "c")]
            print(f"{name}: compiled is {speedup:.0f}x faster")
    return 0


if __name__ == "__main__":
    sys.exit(main())
