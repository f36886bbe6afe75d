"""Benchmark the compiled kernel core against the NumPy fallback.

Times the two hot kernels (mixture log-densities, Fisher vector sums) and a
whole-image encode at a few representative sizes.

    python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from morphofv._kernels import _numpy as numpy_backend
from morphofv.fisher import encode_fv
from morphofv.gmm import GmmModel

try:
    from morphofv._kernels import _core as compiled_backend
except ImportError:
    compiled_backend = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench_log_joint(backend, m, d, k, repeats):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(m, d))
    means = rng.normal(size=(k, d))
    variances = rng.uniform(0.5, 1.5, size=(k, d))
    logw = np.log(np.full(k, 1.0 / k))
    return best_of(lambda: backend.log_joint(x, means, variances, logw), repeats)


def bench_fv_sums(backend, n, d, k, repeats):
    rng = np.random.default_rng(1)
    x = rng.normal(size=(n, d))
    q = rng.uniform(size=(n, k))
    q /= q.sum(axis=1, keepdims=True)
    means = rng.normal(size=(k, d))
    variances = rng.uniform(0.5, 1.5, size=(k, d))
    return best_of(lambda: backend.fv_sums(x, q, means, variances), repeats)


def bench_encode(n, d, k, repeats):
    """encode_fv through whichever backend is active at import."""
    rng = np.random.default_rng(2)
    w = np.full(k, 1.0 / k)
    model = GmmModel(weights=w, means=rng.normal(size=(k, d)),
                     variances=rng.uniform(0.5, 1.5, size=(k, d)))
    points = rng.normal(size=(n, d))
    return best_of(lambda: encode_fv(model, points), repeats)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if compiled_backend is None:
        print("compiled backend not built; showing NumPy fallback only\n")
    backends = [("numpy", numpy_backend)]
    if compiled_backend is not None:
        backends.append(("compiled", compiled_backend))

    print(f"{'kernel':<34}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    cases = [
        ("log_joint  M=2000 d=300 K=64", bench_log_joint, (2000, 300, 64)),
        ("log_joint  M=500  d=16  K=8", bench_log_joint, (500, 16, 8)),
        ("fv_sums    N=15   d=300 K=64", bench_fv_sums, (15, 300, 64)),
        ("fv_sums    N=1000 d=16  K=8", bench_fv_sums, (1000, 16, 8)),
    ]
    for label, fn, shape in cases:
        row = [fn(backend, *shape, args.repeats) for _, backend in backends]
        cells = "".join(f"{t * 1e3:>10.2f}ms" for t in row)
        speedup = f"{row[0] / row[-1]:>9.2f}x" if len(row) == 2 else ""
        print(f"{label:<34}{cells}{speedup}")

    t = bench_encode(15, 300, 64, args.repeats)
    from morphofv import KERNEL_BACKEND
    print(f"\nencode_fv  N=15 d=300 K=64 via active backend ({KERNEL_BACKEND}): {t * 1e3:.2f}ms")


if __name__ == "__main__":
    main()
