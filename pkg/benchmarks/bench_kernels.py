"""Benchmark the numba kernels against their pure-numpy twins.

Runs each hot kernel on realistic workloads for both backends and prints a
table of per-call times and speedups.  The numba functions are called once
before timing so JIT compilation is not charged to the measurement.

Usage:  python benchmarks/bench_kernels.py [--repeats N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from ballrigid.kernels import _numpy_impl

try:
    from ballrigid.kernels import _numba_impl
except ImportError:  # pragma: no cover - numba not installed
    _numba_impl = None


def _time(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(4)
    centers = rng.uniform(-0.3, 0.3, size=(10, 3))
    point = np.ascontiguousarray(rng.uniform(-0.3, 0.3, size=3))
    batch = np.ascontiguousarray(rng.uniform(-0.3, 0.3, size=(5000, 3)))
    p0 = np.ascontiguousarray(rng.uniform(-0.3, 0.3, size=3))
    u = np.ascontiguousarray(rng.normal(size=3))
    u /= np.linalg.norm(u)
    cloud_a = np.ascontiguousarray(rng.normal(size=(2000, 3)))
    cloud_b = np.ascontiguousarray(rng.normal(size=(2000, 3)))

    workloads = [
        ("max_dist_to_centers (1 pt, 10 ctr)", "max_dist_to_centers", (point, centers)),
        ("max_dist_batch (5000 pts, 10 ctr)", "max_dist_batch", (batch, centers)),
        (
            "min_max_dist_on_segment (200 it)",
            "min_max_dist_on_segment",
            (p0, u, -5.0, 5.0, centers),
        ),
        ("directed_max_min (2000 x 2000)", "directed_max_min", (cloud_a, cloud_b)),
    ]

    print(f"{'kernel':<38}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    print("-" * 72)
    for label, name, call_args in workloads:
        np_fn = getattr(_numpy_impl, name)
        t_np = _time(np_fn, call_args, args.repeats)
        if _numba_impl is None:
            print(f"{label:<38}{t_np * 1e6:>10.1f}us{'n/a':>12}{'n/a':>10}")
            continue
        nb_fn = getattr(_numba_impl, name)
        nb_fn(*call_args)  # warm the JIT cache
        t_nb = _time(nb_fn, call_args, args.repeats)
        # both backends must agree before their timings mean anything
        r_np, r_nb = np_fn(*call_args), nb_fn(*call_args)
        assert np.allclose(np.asarray(r_np), np.asarray(r_nb), atol=1e-9), name
        print(
            f"{label:<38}{t_np * 1e6:>10.1f}us{t_nb * 1e6:>10.1f}us"
            f"{t_np / t_nb:>9.1f}x"
        )


if __name__ == "__main__":
    main()
