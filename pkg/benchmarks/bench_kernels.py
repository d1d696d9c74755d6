"""Benchmark: compiled vs pure-Python coordinate-descent kernels.

Times the full inner solve (refresh + nine-coordinate sweep cycles to
convergence) on representative instances and reports the speedup. Run from
the repository root after building the extension in place:

    python setup.py build_ext --inplace
    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rimu_opt import _kernels_py  # noqa: E402

try:
    from rimu_opt import _kernels
except ImportError:
    _kernels = None


def make_instance(rng: np.random.Generator, m: int):
    h = rng.standard_normal((m, 3))
    h /= np.linalg.norm(h, axis=1, keepdims=True)
    mat = rng.standard_normal((m, m))
    r = mat @ mat.T + 0.5 * np.eye(m)
    rinv = np.linalg.inv(r)
    c = np.ascontiguousarray(rinv @ h)
    a = h.T @ rinv @ h
    return c, np.ascontiguousarray(0.5 * (a + a.T)), np.ascontiguousarray(np.eye(3))


def time_solves(kernel, instances, repeats: int = 5) -> tuple[float, int]:
    best = float("inf")
    sweeps_total = 0
    for _ in range(repeats):
        sweeps_total = 0
        started = time.perf_counter()
        for c, a, v in instances:
            q = np.ascontiguousarray(np.eye(3))
            _, sweeps, _ = kernel.solve(c, a, v, q, 1e-11, 2000, 1e-12)
            sweeps_total += sweeps
        best = min(best, time.perf_counter() - started)
    return best, sweeps_total


def main() -> None:
    rng = np.random.default_rng(2024)
    print(f"{'m':>4} {'instances':>10} {'sweeps':>8} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for m in (3, 5, 10, 20):
        instances = [make_instance(rng, m) for _ in range(20)]
        t_py, sweeps = time_solves(_kernels_py, instances)
        if _kernels is None:
            print(f"{m:>4} {len(instances):>10} {sweeps:>8} {t_py:>11.4f}s {'not built':>12} {'-':>9}")
            continue
        t_c, sweeps_c = time_solves(_kernels, instances)
        assert sweeps_c == sweeps, "backends disagree on sweep counts"
        print(
            f"{m:>4} {len(instances):>10} {sweeps:>8} {t_py:>11.4f}s {t_c:>11.4f}s {t_py / t_c:>8.1f}x"
        )
    if _kernels is None:
        print("\ncompiled extension not built; showing the pure-Python baseline only")


if __name__ == "__main__":
    main()
