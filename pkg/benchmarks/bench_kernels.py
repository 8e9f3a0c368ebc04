"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 1000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from nibblepack import _fallback
from nibblepack.graph import EdgeSet

try:
    from nibblepack import _kernels
except ImportError:
    _kernels = None


def random_graph(n, p, seed):
    g = np.random.default_rng(seed)
    us, vs = np.triu_indices(n, 1)
    keep = g.random(us.size) < p
    return EdgeSet.from_arrays(n, us[keep], vs[keep])


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    n = args.n
    O = random_graph(n, 0.5, 1)
    E = random_graph(n, 0.05, 2)
    us, vs = O.edges()
    small = random_graph(50, 0.3, 3)
    cases = {
        "upper_edges": lambda m: m.upper_edges(O.bits, n),
        "pair_popcounts": lambda m: m.pair_popcounts(O.bits, E.bits, us, vs),
        "mixed_pair_counts": lambda m: m.mixed_pair_counts(O.bits, E.bits, us, vs),
        "max_pair_popcount": lambda m: m.max_pair_popcount(O.bits, E.bits, n, True),
        "max_independent_set(n=50)": lambda m: m.max_independent_set(np.ascontiguousarray(small.bits[:, :1]), 50),
    }
    print(f"n={n}, |O|={len(O)}, |E|={len(E)}")
    print(f"{'kernel':28s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, fn in cases.items():
        tp = best_of(lambda: fn(_fallback), args.repeat)
        if _kernels is None:
            print(f"{name:28s} {tp:10.4f} {'n/a':>10s}")
            continue
        tc = best_of(lambda: fn(_kernels), args.repeat)
        print(f"{name:28s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
