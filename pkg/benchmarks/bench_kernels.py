"""Time the compiled and pure-Python kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--sizes 200 500 1000] [--repeat 5]

Prints one line per (kernel, size, backend) with the best-of-``repeat``
wall time and the speedup of each backend over the pure-Python one, and
checks that both backends return the same result.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from fuzzylabel import _kernels
from fuzzylabel.graph import build_propagation, gaussian_similarity, median_bandwidth


def best_time(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.shape == b.shape and np.allclose(a, b, rtol=1e-10, atol=1e-10)
    return True


def cases(n, rng):
    X = rng.standard_normal((n, 8))
    Q = rng.standard_normal((n // 4, 8))
    C = rng.standard_normal((5, 8))
    P = build_propagation(gaussian_similarity(X, median_bandwidth(X))).propagation
    Y = np.eye(5)[rng.integers(0, 5, n)]
    sq = _kernels.get_backend("python").pairwise_sq_dists(Q, X)
    csq = _kernels.get_backend("python").pairwise_sq_dists(X, C)
    return {
        "pairwise_sq_dists": lambda k: k.pairwise_sq_dists(Q, X),
        "knn_indices(k=13)": lambda k: k.knn_indices(sq, 13),
        "fcm_memberships": lambda k: k.fcm_memberships(csq, 2.0),
        "propagate": lambda k: k.propagate(P, Y, 0.5, 1e-6, 1000),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 500, 1000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)} (active: {_kernels.BACKEND})")
    print(f"{'kernel':<20}{'n':>6}{'backend':>9}{'seconds':>12}{'speedup':>9}")
    rng = np.random.default_rng(0)
    for n in args.sizes:
        for name, call in cases(n, rng).items():
            ref_t, ref = best_time(lambda: call(_kernels.get_backend("python")), args.repeat)
            for b in backends:
                t, out = (ref_t, ref) if b == "python" else best_time(lambda: call(_kernels.get_backend(b)), args.repeat)
                flag = "" if _same(out, ref) else "  MISMATCH"
                print(f"{name:<20}{n:>6}{b:>9}{t:>12.6f}{ref_t / t:>8.1f}x{flag}")


if __name__ == "__main__":
    main()
