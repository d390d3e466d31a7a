"""Benchmark the numba kernel lane against the numpy/scipy fallback.

Usage: python benchmarks/bench_kernels.py [--nodes 200000] [--seed 11]

Generates a synthetic ownership graph, then times each hot kernel on both
lanes (JIT warmup excluded). The OWNET_NUMBA environment flag selects the
lane in production; here both are invoked explicitly.
"""

from __future__ import annotations

import argparse
import random
import time

from ownet import _accel, _kernels
from ownet.analytics import undirected_simple_csr
from ownet.generator import GeneratorConfig, generate
from ownet.ownership import integrated_ownership


def _time(fn, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--sources", type=int, default=200)
    args = ap.parse_args()

    if not _accel.NUMBA_AVAILABLE:
        print("numba unavailable: only the numpy lane can be benchmarked")

    print(f"generating graph: {args.nodes} nodes, seed {args.seed}")
    g = generate(GeneratorConfig(node_count=args.nodes, seed=args.seed))
    print(f"{g.node_count} nodes, {g.edge_count} edges")
    _kernels.warmup()

    n = g.node_count
    indptr, dst = g.out_indptr, g.edge_dst
    esrc, edst = g.edge_src, g.edge_dst
    u_indptr, u_indices = undirected_simple_csr(g)
    rng = random.Random(0)
    sources = rng.sample(g.ids, min(args.sources, n))

    cases = {
        "scc": lambda lane: _kernels.scc_labels(n, indptr, dst, esrc, edst, use_numba=lane),
        "wcc": lambda lane: _kernels.wcc_labels(n, esrc, edst, use_numba=lane),
        "clustering": lambda lane: _kernels.clustering_coefficients(n, u_indptr, u_indices, use_numba=lane),
        f"ownership x{len(sources)}": lambda lane: [
            integrated_ownership(g, s, use_numba=lane) for s in sources
        ],
    }

    header = f"{'kernel':<18} {'numba':>10} {'numpy':>10} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, fn in cases.items():
        t_np = _time(lambda: fn(False))
        if _accel.NUMBA_AVAILABLE:
            t_nb = _time(lambda: fn(True))
            print(f"{name:<18} {t_nb * 1e3:>8.1f}ms {t_np * 1e3:>8.1f}ms {t_np / t_nb:>8.1f}x")
        else:
            print(f"{name:<18} {'n/a':>10} {t_np * 1e3:>8.1f}ms {'':>9}")


if __name__ == "__main__":
    main()
