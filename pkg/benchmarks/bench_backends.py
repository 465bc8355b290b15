"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_backends.py [--n 300] [--repeat 3]

Each stage is run once per backend to warm caches and then timed
``--repeat`` times; the best time is reported.
"""

import argparse
import time

import numpy as np

from c2plus import _backend, preprocess, trace_norm
from c2plus.extension import Interpolant
from c2plus.qp import QuadL1Problem, solve_quad_l1


def qp_batch(rng_seed=0, count=300):
    rng = np.random.default_rng(rng_seed)
    out = []
    for _ in range(count):
        d = int(rng.integers(2, 12))
        A = rng.normal(size=(d, d))
        L = rng.normal(size=(int(rng.integers(1, 12)), d))
        out.append(QuadL1Problem(A @ A.T, rng.normal(size=d), L, rng.normal(size=L.shape[0])))
    return out


def stages(n):
    rng = np.random.default_rng(1)
    E = rng.random((n, 2))
    f = (1.0 + E[:, 0] * E[:, 1]) ** 2
    problems = qp_batch()
    X = rng.random((2000, 2))
    box = {}

    def run_preprocess():
        box["state"] = preprocess(E)

    def run_norm():
        box["M"] = trace_norm(box["state"], f)

    def run_query():
        Interpolant(box["state"], f, box["M"]).jets(X)

    def run_wspd():
        box["state"].index.build_wspd(1.0 / 16)

    def run_qp():
        for p in problems:
            solve_quad_l1(p)

    return [("preprocess", run_preprocess), ("trace norm", run_norm), ("2000 jets", run_query),
            ("WSPD", run_wspd), ("300 QPs", run_qp)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    results = {}
    for name in ("cython", "pure"):
        try:
            _backend.use(name)
        except ImportError:
            print(f"{name}: not available")
            continue
        results[name] = {}
        for label, fn in stages(args.n):
            fn()
            results[name][label] = best_of(fn, args.repeat)
    print(f"N = {args.n}")
    print(f"{'stage':<12}" + "".join(f"{b:>12}" for b in results) + "     speedup")
    for label in next(iter(results.values())):
        row = [results[b][label] for b in results]
        speed = row[-1] / row[0] if len(row) == 2 else float("nan")
        print(f"{label:<12}" + "".join(f"{t:>11.3f}s" for t in row) + f"{speed:>11.1f}x")


if __name__ == "__main__":
    main()
