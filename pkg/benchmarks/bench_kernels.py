"""Time the numpy and numba kernel paths on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from specroute import _kernels
from specroute.congestion import enumerate_labeled_graphs
from specroute.simulator import bcp_table


def cases():
    rs = np.random.default_rng(0)
    n, d = 7, 8
    psi = rs.normal(size=d**n) + 1j * rs.normal(size=d**n)
    op = rs.normal(size=(d, d)) + 1j * rs.normal(size=(d, d))
    table = bcp_table(d, 1, 1).astype(np.int64)
    sites = np.array([2, 3], dtype=np.int64)
    graphs = [np.array(g.adjacency, dtype=np.int64) for g in enumerate_labeled_graphs(5)][::16]
    return {
        "level_map n=7 d=8": lambda k: k["level_map"](n, d, sites, table),
        "site_operator n=7 d=8": lambda k: k["site_operator"](psi, n, d, 3, op),
        "min_rounds 64 graphs m=5": lambda k: [k["min_rounds"](a, 5, K) for a in graphs for K in (1, 2, 3)],
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = {"numpy": _kernels.NUMPY_KERNELS, "numba": _kernels.NUMBA_KERNELS}
    print(f"{'kernel':28s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases().items():
        times = {}
        for label, kernels in backends.items():
            fn(kernels)  # compile / warm caches
            times[label] = min(timeit.repeat(lambda: fn(kernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:28s} {times['numpy']:12.2f} {times['numba']:12.2f} {times['numpy'] / times['numba']:8.1f}x")


if __name__ == "__main__":
    main()
