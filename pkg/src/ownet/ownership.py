"""Integrated-ownership reasoning.

Two routes to the same quantity: exhaustive threshold-pruned path enumeration
(the small-instance oracle, exact for a given epsilon) and a fixed-point
iteration v = d_s + W'v that sums the full path series in the epsilon -> 0
limit. W' is the share matrix with the source's outgoing row removed, so the
source never occurs as an internal node of a counted path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DivergentCycleError
from .model import OwnershipGraph

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000
ORACLE_EPS = 1e-6


@dataclass(frozen=True)
class BaldonePath:
    """A directed path whose weight (product of shares) exceeds the pruning
    threshold and whose start node never recurs internally."""

    nodes: tuple[str, ...]
    weight: float


@dataclass(frozen=True)
class OwnershipVector:
    """Accumulated ownership of one source over every reachable company.

    ``epsilon`` is the pruning threshold used, 0.0 for the limit computation.
    Missing keys denote zero ownership.
    """

    source: str
    values: dict[str, float]
    epsilon: float
    converged: bool
    iterations: int

    def value(self, target: str) -> float:
        return self.values.get(target, 0.0)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "epsilon": self.epsilon,
            "converged": self.converged,
            "iterations": self.iterations,
            "values": {k: self.values[k] for k in sorted(self.values)},
        }


def _walk_paths(g: OwnershipGraph, s: str, eps: float):
    """Yield (nodes, weight) for every path from s with weight > eps in which
    s is not internal. Raises DivergentCycleError when a unit-product cycle is
    reachable (the enumeration would otherwise never terminate)."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    g.index_of(s)
    path = [s]
    prods = [1.0]
    # product at the moment each path node was entered; a re-entry at the same
    # product means the cycle multiplies by >= 1 (shares never exceed 1)
    entry_prod: dict[str, list[float]] = {}
    frames = [iter(g.out_items(s))]

    while frames:
        prod = prods[-1]
        descended = False
        for owned, share in frames[-1]:
            w = prod * share
            if not w > eps:
                continue
            stack = entry_prod.get(owned)
            if stack and w >= stack[-1]:
                cycle_start = len(path) - 1
                while path[cycle_start] != owned:
                    cycle_start -= 1
                raise DivergentCycleError(path[cycle_start:])
            path.append(owned)
            yield tuple(path), w
            if owned == s:  # extending past s would make s internal
                path.pop()
                continue
            prods.append(w)
            entry_prod.setdefault(owned, []).append(w)
            frames.append(iter(g.out_items(owned)))
            descended = True
            break
        if not descended:
            frames.pop()
            last = path.pop()
            prods.pop()
            if frames:
                entry_prod[last].pop()


def enumerate_baldone_paths(g: OwnershipGraph, s: str, t: str, eps: float) -> list[BaldonePath]:
    """All threshold-surviving paths from s to t, heaviest first."""
    g.index_of(t)
    found = [BaldonePath(nodes, w) for nodes, w in _walk_paths(g, s, eps) if nodes[-1] == t]
    found.sort(key=lambda p: (-p.weight, p.nodes))
    return found


def epsilon_baldone_ownership(g: OwnershipGraph, s: str, eps: float) -> OwnershipVector:
    """Per-target sums of path weights, pruned per path at eps (the literal
    finite-sum definition; exact oracle for small instances)."""
    totals: dict[str, float] = {}
    for nodes, w in _walk_paths(g, s, eps):
        t = nodes[-1]
        totals[t] = totals.get(t, 0.0) + w
    return OwnershipVector(source=s, values=totals, epsilon=eps, converged=True, iterations=0)


def integrated_ownership(
    g: OwnershipGraph,
    s: str,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    use_numba: bool | None = None,
) -> OwnershipVector:
    """Limit ownership of ``s`` via fixed-point iteration on the subgraph
    reachable from ``s``. Non-convergence is reported, never raised."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    s_idx = g.index_of(s)
    reach = _kernels.bfs_reachable(g.out_indptr, g.edge_dst, s_idx, use_numba=use_numba)
    ns = len(reach)
    local = {int(v): i for i, v in enumerate(reach)}

    d = np.zeros(ns)
    esrc: list[int] = []
    edst: list[int] = []
    ew: list[float] = []
    for v in reach:
        v = int(v)
        lo, hi = g.out_indptr[v], g.out_indptr[v + 1]
        for k in range(lo, hi):
            t_local = local[int(g.edge_dst[k])]
            if v == s_idx:
                d[t_local] = g.edge_w[k]
            else:
                esrc.append(local[v])
                edst.append(t_local)
                ew.append(float(g.edge_w[k]))

    v, iterations, converged = _kernels.ownership_fixed_point(
        ns,
        np.asarray(esrc, np.int64),
        np.asarray(edst, np.int64),
        np.asarray(ew, np.float64),
        d,
        tol,
        max_iter,
        use_numba=use_numba,
    )
    values = {g.ids[int(reach[i])]: float(v[i]) for i in range(ns) if v[i] > 0.0}
    return OwnershipVector(source=s, values=values, epsilon=0.0, converged=bool(converged), iterations=int(iterations))


@dataclass(frozen=True)
class ConvergenceReport:
    divergent_cycles: tuple[tuple[str, ...], ...]
    failed_sources: tuple[str, ...] = ()
    convergent: bool = True

    def to_dict(self) -> dict:
        return {
            "divergent_cycles": [list(c) for c in self.divergent_cycles],
            "failed_sources": list(self.failed_sources),
            "convergent": self.convergent,
        }


def _unit_cycles(g: OwnershipGraph) -> list[list[str]]:
    """One witnessing cycle per strongly connected group of unit-weight edges.

    Shares are capped at 1, so a cycle's product reaches 1 exactly when every
    edge on it has weight 1; these are the structural divergence witnesses.
    """
    unit = g.edge_w >= 1.0
    src = g.edge_src[unit]
    dst = g.edge_dst[unit]
    cycles: list[list[str]] = []
    for a, b in zip(src, dst):
        if a == b:
            cycles.append([g.ids[int(a)]])
    # non-loop cycles: SCCs of size >= 2 in the unit-edge subgraph
    n = g.node_count
    indptr = np.zeros(n + 1, dtype=np.int64)
    order = np.argsort(src, kind="stable")
    srt_src, srt_dst = src[order], dst[order]
    np.cumsum(np.bincount(srt_src, minlength=n), out=indptr[1:])
    labels, _ = _kernels.scc_labels(n, indptr, srt_dst, src, dst, use_numba=False)
    sizes = np.bincount(labels) if n else np.array([])
    big = {int(lab) for lab in np.flatnonzero(sizes >= 2)}
    seen_labels: set[int] = set()
    for start in range(n):
        lab = int(labels[start]) if n else -1
        if lab not in big or lab in seen_labels:
            continue
        seen_labels.add(lab)
        # walk unit edges inside the SCC until a node repeats
        walk = [start]
        pos = {start: 0}
        node = start
        while True:
            nxt = -1
            for k in range(indptr[node], indptr[node + 1]):
                cand = int(srt_dst[k])
                if labels[cand] == lab:
                    nxt = cand
                    break
            if nxt == -1:
                break
            if nxt in pos:
                cycle = walk[pos[nxt] :]
                cycles.append([g.ids[i] for i in cycle])
                break
            pos[nxt] = len(walk)
            walk.append(nxt)
            node = nxt
    uniq = sorted({tuple(c) for c in cycles}, key=lambda c: (len(c), c))
    return [list(c) for c in uniq]


VALUE_CAP_TOLERANCE = 1e-6


def check_convergence(
    g: OwnershipGraph,
    check_sources: bool = True,
    use_numba: bool | None = None,
) -> ConvergenceReport:
    """Structural witnesses (unit-product cycles) plus, optionally, a dynamic
    sweep flagging every source whose fixed-point iteration fails to contract
    or lands on an ownership value above 1 (only possible on over-allocated
    graphs, and meaningless as a share)."""
    cycles = _unit_cycles(g)
    failed: list[str] = []
    if check_sources:
        from .parallel import map_sources

        vecs = map_sources(lambda eid: integrated_ownership(g, eid, use_numba=use_numba), g.ids)
        for eid, vec in vecs.items():
            if not vec.converged or any(v > 1.0 + VALUE_CAP_TOLERANCE for v in vec.values.values()):
                failed.append(eid)
    return ConvergenceReport(
        divergent_cycles=tuple(tuple(c) for c in cycles),
        failed_sources=tuple(failed),
        convergent=not cycles and not failed,
    )
