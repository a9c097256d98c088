"""Compare the compiled and pure-Python reachability kernels.

    python benchmarks/bench_reach.py [--nodes N] [--repeat R]

Two workloads: random caller graphs of growing size (every node used as a
start, which is what per-class selection does), and the caller graphs of
the generated corpus.
"""
import argparse
import time

import numpy as np

from chtest._kernels import BACKEND, reach_many, reach_many_py
from chtest.corpus import generate_program
from chtest.distiller import distill_initial
from chtest.model import ResolutionMode
from chtest.selector import CallerGraph


def random_graph(n, out_degree, test_fraction, rng):
    counts = rng.poisson(out_degree, n)
    indptr = np.zeros(n + 1, dtype=np.int32)
    indptr[1:] = np.cumsum(counts)
    indices = rng.integers(0, n, indptr[-1], dtype=np.int32)
    for u in range(n):
        indices[indptr[u]:indptr[u + 1]].sort()
    terminal = (rng.random(n) < test_fraction).astype(np.uint8)
    return indptr, indices, terminal


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def check_same(a, b):
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]), "kernels disagree"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, nargs="*", default=[500, 2000, 8000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--corpus", type=int, default=100)
    args = ap.parse_args()
    if BACKEND != "cython":
        print("compiled kernel not built; only the Python fallback is available")
    rng = np.random.default_rng(0)

    print(f"{'workload':<28}{'starts':>8}{'compiled s':>12}{'python s':>12}{'speedup':>10}")
    for n in args.nodes:
        g = random_graph(n, 2.0, 0.1, rng)
        starts = np.arange(n, dtype=np.int32)
        check_same(reach_many(*g, starts), reach_many_py(*g, starts))
        fast = best_of(lambda: reach_many(*g, starts), args.repeat)
        slow = best_of(lambda: reach_many_py(*g, starts), args.repeat)
        print(f"{f'random n={n}':<28}{n:>8}{fast:>12.4f}{slow:>12.4f}{slow / fast:>9.1f}x")

    graphs = [CallerGraph(distill_initial(generate_program(s), ResolutionMode.poly()))
              for s in range(args.corpus)]
    jobs = [(g.indptr, g.indices, g.terminal, np.arange(len(g.nodes), dtype=np.int32))
            for g in graphs]
    fast = best_of(lambda: [reach_many(*j) for j in jobs], args.repeat)
    slow = best_of(lambda: [reach_many_py(*j) for j in jobs], args.repeat)
    n_starts = sum(len(j[3]) for j in jobs)
    print(f"{f'corpus ({args.corpus} programs)':<28}{n_starts:>8}{fast:>12.4f}{slow:>12.4f}"
          f"{slow / fast:>9.1f}x")


if __name__ == "__main__":
    main()
