"""Hot numeric kernels: SCC, WCC, clustering, BFS, ownership fixed point.

Each kernel has a numba ``@njit`` implementation and a numpy/scipy fallback;
``use_numba=None`` follows the OWNET_NUMBA environment flag. Both lanes are
exercised by the test suite and compared in benchmarks/bench_kernels.py.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from ._accel import NUMBA_AVAILABLE, resolve_lane

if NUMBA_AVAILABLE:
    from numba import njit
else:  # decorator that leaves the function as plain Python (never dispatched to)

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


# -- strongly connected components (iterative Tarjan) -------------------------


@njit(cache=True)
def _tarjan_scc_njit(indptr, indices):
    n = indptr.shape[0] - 1
    index = np.full(n, -1, np.int64)
    lowlink = np.empty(n, np.int64)
    on_stack = np.zeros(n, np.bool_)
    stack = np.empty(n, np.int64)
    sp_ = 0
    labels = np.full(n, -1, np.int64)
    ncomp = 0
    counter = 0
    dfs_node = np.empty(n + 1, np.int64)
    dfs_edge = np.empty(n + 1, np.int64)
    for root in range(n):
        if index[root] != -1:
            continue
        top = 0
        dfs_node[0] = root
        dfs_edge[0] = indptr[root]
        index[root] = counter
        lowlink[root] = counter
        counter += 1
        stack[sp_] = root
        sp_ += 1
        on_stack[root] = True
        while top >= 0:
            v = dfs_node[top]
            e = dfs_edge[top]
            if e < indptr[v + 1]:
                dfs_edge[top] = e + 1
                w = indices[e]
                if index[w] == -1:
                    index[w] = counter
                    lowlink[w] = counter
                    counter += 1
                    stack[sp_] = w
                    sp_ += 1
                    on_stack[w] = True
                    top += 1
                    dfs_node[top] = w
                    dfs_edge[top] = indptr[w]
                elif on_stack[w] and index[w] < lowlink[v]:
                    lowlink[v] = index[w]
            else:
                if lowlink[v] == index[v]:
                    while True:
                        u = stack[sp_ - 1]
                        sp_ -= 1
                        on_stack[u] = False
                        labels[u] = ncomp
                        if u == v:
                            break
                    ncomp += 1
                top -= 1
                if top >= 0:
                    p = dfs_node[top]
                    if lowlink[v] < lowlink[p]:
                        lowlink[p] = lowlink[v]
    return labels, ncomp


def _scc_scipy(n, esrc, edst):
    mat = sp.csr_matrix((np.ones(len(esrc), np.int8), (esrc, edst)), shape=(n, n))
    ncomp, labels = connected_components(mat, directed=True, connection="strong")
    return labels.astype(np.int64), ncomp


def scc_labels(n: int, indptr, indices, esrc, edst, use_numba: bool | None = None):
    """Component label per node; labels are arbitrary ints in [0, ncomp)."""
    if n == 0:
        return np.empty(0, np.int64), 0
    if resolve_lane(use_numba):
        return _tarjan_scc_njit(indptr, indices)
    return _scc_scipy(n, esrc, edst)


# -- weakly connected components (union-find) ---------------------------------


@njit(cache=True)
def _wcc_roots_njit(n, esrc, edst):
    parent = np.arange(n)
    for k in range(esrc.shape[0]):
        a = esrc[k]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = edst[k]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
    for i in range(n):
        r = i
        while parent[r] != r:
            r = parent[r]
        j = i
        while parent[j] != r:
            nxt = parent[j]
            parent[j] = r
            j = nxt
    return parent


def _wcc_scipy(n, esrc, edst):
    mat = sp.csr_matrix((np.ones(len(esrc), np.int8), (esrc, edst)), shape=(n, n))
    _, labels = connected_components(mat, directed=False)
    return labels.astype(np.int64)


def wcc_labels(n: int, esrc, edst, use_numba: bool | None = None):
    """Component label per node under undirected reachability."""
    if n == 0:
        return np.empty(0, np.int64), 0
    if resolve_lane(use_numba):
        roots = _wcc_roots_njit(n, np.asarray(esrc, np.int64), np.asarray(edst, np.int64))
    else:
        roots = _wcc_scipy(n, esrc, edst)
    uniq, labels = np.unique(roots, return_inverse=True)
    return labels, len(uniq)


# -- local clustering coefficients --------------------------------------------


@njit(cache=True)
def _clustering_njit(indptr, indices):
    # indices must hold sorted, deduplicated, loop-free undirected adjacency
    n = indptr.shape[0] - 1
    coeff = np.zeros(n)
    for v in range(n):
        lo, hi = indptr[v], indptr[v + 1]
        k = hi - lo
        if k < 2:
            continue
        links2 = 0  # ordered neighbour pairs of v that are themselves adjacent
        for e in range(lo, hi):
            u = indices[e]
            i, j = lo, indptr[u]
            jhi = indptr[u + 1]
            while i < hi and j < jhi:
                a, b = indices[i], indices[j]
                if a == b:
                    links2 += 1
                    i += 1
                    j += 1
                elif a < b:
                    i += 1
                else:
                    j += 1
        coeff[v] = links2 / (k * (k - 1))
    return coeff


def _clustering_scipy(n, indptr, indices):
    adj = sp.csr_matrix((np.ones(len(indices), np.float64), indices, indptr), shape=(n, n))
    links2 = np.asarray((adj @ adj).multiply(adj).sum(axis=1)).ravel()
    deg = np.diff(indptr)
    denom = deg * (deg - 1)
    out = np.zeros(n)
    mask = denom > 0
    out[mask] = links2[mask] / denom[mask]
    return out


def clustering_coefficients(n: int, indptr, indices, use_numba: bool | None = None):
    """Per-node local clustering on a simple undirected adjacency (CSR, sorted)."""
    if n == 0:
        return np.empty(0, np.float64)
    if resolve_lane(use_numba):
        return _clustering_njit(indptr, indices)
    return _clustering_scipy(n, indptr, indices)


# -- BFS reachability ----------------------------------------------------------


@njit(cache=True, nogil=True)
def _bfs_njit(indptr, indices, start):
    n = indptr.shape[0] - 1
    visited = np.zeros(n, np.bool_)
    queue = np.empty(n, np.int64)
    head, tail = 0, 0
    visited[start] = True
    queue[tail] = start
    tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if not visited[w]:
                visited[w] = True
                queue[tail] = w
                tail += 1
    return queue[:tail]


def _bfs_numpy(indptr, indices, start):
    n = indptr.shape[0] - 1
    visited = np.zeros(n, bool)
    visited[start] = True
    order = [np.array([start], np.int64)]
    frontier = order[0]
    while frontier.size:
        chunks = [indices[indptr[v] : indptr[v + 1]] for v in frontier]
        if not chunks:
            break
        nxt = np.unique(np.concatenate(chunks)) if chunks else np.empty(0, np.int64)
        nxt = nxt[~visited[nxt]]
        visited[nxt] = True
        if nxt.size:
            order.append(nxt)
        frontier = nxt
    return np.concatenate(order)


def bfs_reachable(indptr, indices, start: int, use_numba: bool | None = None):
    """Indices reachable from ``start`` (inclusive) following out-edges."""
    if resolve_lane(use_numba):
        return _bfs_njit(indptr, indices, start)
    return _bfs_numpy(indptr, indices, start)


# -- ownership fixed point ------------------------------------------------------

# Iterates v <- d + W'v on the reachable submatrix (edge-list form). The caller
# removes the source's out-edges from the transition set so the source is never
# internal to a path. Aborts early when the iterate blows up (divergent input).
_BLOWUP = 1e15


@njit(cache=True, nogil=True)
def _ownership_iter_njit(ns, esrc, edst, ew, d, tol, max_iter):
    v = d.copy()
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        acc = np.zeros(ns)
        for k in range(esrc.shape[0]):
            acc[edst[k]] += v[esrc[k]] * ew[k]
        delta = 0.0
        bad = False
        for i in range(ns):
            nv = d[i] + acc[i]
            dv = nv - v[i]
            if dv < 0.0:
                dv = -dv
            if dv > delta:
                delta = dv
            v[i] = nv
            if not np.isfinite(nv) or nv > _BLOWUP:
                bad = True
        if bad:
            return v, it, False
        if delta < tol:
            converged = True
            break
    return v, it, converged


def _ownership_iter_numpy(ns, esrc, edst, ew, d, tol, max_iter):
    v = d.copy()
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        acc = np.bincount(edst, weights=v[esrc] * ew, minlength=ns)
        nv = d + acc
        if not np.all(np.isfinite(nv)) or nv.max(initial=0.0) > _BLOWUP:
            return nv, it, False
        delta = np.abs(nv - v).max(initial=0.0)
        v = nv
        if delta < tol:
            converged = True
            break
    return v, it, converged


def ownership_fixed_point(ns, esrc, edst, ew, d, tol, max_iter, use_numba: bool | None = None):
    """Fixed point of v = d + W'v over ``ns`` nodes; returns (v, iterations, converged)."""
    if len(esrc) == 0:
        return d.copy(), 1, True
    if resolve_lane(use_numba):
        return _ownership_iter_njit(
            ns,
            np.asarray(esrc, np.int64),
            np.asarray(edst, np.int64),
            np.asarray(ew, np.float64),
            d,
            tol,
            max_iter,
        )
    return _ownership_iter_numpy(ns, esrc, edst, ew, d, tol, max_iter)


def warmup(use_numba: bool | None = None) -> None:
    """Trigger JIT compilation on toy inputs so timed runs exclude compile cost."""
    if not resolve_lane(use_numba):
        return
    indptr = np.array([0, 1, 2], np.int64)
    indices = np.array([1, 0], np.int64)
    esrc = np.array([0, 1], np.int64)
    edst = np.array([1, 0], np.int64)
    scc_labels(2, indptr, indices, esrc, edst, use_numba=True)
    wcc_labels(2, esrc, edst, use_numba=True)
    clustering_coefficients(2, indptr, indices, use_numba=True)
    bfs_reachable(indptr, indices, 0, use_numba=True)
    ownership_fixed_point(2, esrc[:1], edst[:1], np.array([0.5]), np.zeros(2), 1e-9, 10, use_numba=True)
