"""Descriptive network analytics: components, degrees, clustering, regions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SubgraphError
from .model import OwnershipGraph


@dataclass(frozen=True)
class Partition:
    """Nodes grouped into components; component ids are the smallest member id."""

    membership: dict[str, str]
    components: dict[str, tuple[str, ...]]

    @property
    def count(self) -> int:
        return len(self.components)

    def max_size(self) -> int:
        return max((len(m) for m in self.components.values()), default=0)

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "components": [
                {"id": cid, "members": list(members)}
                for cid, members in sorted(self.components.items())
            ],
        }


def _partition_from_labels(g: OwnershipGraph, labels: np.ndarray) -> Partition:
    groups: dict[int, list[str]] = {}
    for idx, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(g.ids[idx])
    components: dict[str, tuple[str, ...]] = {}
    membership: dict[str, str] = {}
    for members in groups.values():
        members.sort()
        cid = members[0]
        components[cid] = tuple(members)
        for m in members:
            membership[m] = cid
    return Partition(membership, components)


def strongly_connected_components(g: OwnershipGraph, use_numba: bool | None = None) -> Partition:
    labels, _ = _kernels.scc_labels(
        g.node_count, g.out_indptr, g.edge_dst, g.edge_src, g.edge_dst, use_numba=use_numba
    )
    return _partition_from_labels(g, labels)


def weakly_connected_components(g: OwnershipGraph, use_numba: bool | None = None) -> Partition:
    labels, _ = _kernels.wcc_labels(g.node_count, g.edge_src, g.edge_dst, use_numba=use_numba)
    return _partition_from_labels(g, labels)


def undirected_simple_csr(g: OwnershipGraph) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric adjacency of the simple undirected projection (no self-loops),
    as CSR (indptr, indices) with each neighbour list sorted and deduplicated."""
    n = g.node_count
    mask = g.edge_src != g.edge_dst
    a = g.edge_src[mask]
    b = g.edge_dst[mask]
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    if len(lo):
        pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
        lo, hi = pairs[:, 0], pairs[:, 1]
    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst


@dataclass(frozen=True)
class AnalyticsReport:
    node_count: int
    person_count: int
    company_count: int
    edge_count: int
    scc_count: int
    wcc_count: int
    max_scc_size: int
    max_wcc_size: int
    avg_wcc_size: float
    avg_in_degree: float
    avg_out_degree: float
    max_in_degree: int
    max_out_degree: int
    avg_clustering_coefficient: float
    self_loop_count: int
    degree_histogram: dict[int, int]

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "degree_histogram"}
        d["degree_histogram"] = [[deg, cnt] for deg, cnt in sorted(self.degree_histogram.items())]
        return d


def analytics_report(g: OwnershipGraph, use_numba: bool | None = None) -> AnalyticsReport:
    """Graph-wide metrics per the standard conventions used here:

    degrees are directed and include self-loops; averages run over all nodes
    (persons included); clustering is the local coefficient on the undirected
    simple projection, with nodes of degree < 2 contributing 0; the degree
    histogram buckets total (in + out) degree.
    """
    n = g.node_count
    in_deg = np.diff(g.in_indptr)
    out_deg = np.diff(g.out_indptr)

    scc_lab, scc_count = _kernels.scc_labels(
        n, g.out_indptr, g.edge_dst, g.edge_src, g.edge_dst, use_numba=use_numba
    )
    wcc_lab, wcc_count = _kernels.wcc_labels(n, g.edge_src, g.edge_dst, use_numba=use_numba)
    max_scc = int(np.bincount(scc_lab).max()) if n else 0
    max_wcc = int(np.bincount(wcc_lab).max()) if n else 0

    indptr, indices = undirected_simple_csr(g)
    coeffs = _kernels.clustering_coefficients(n, indptr, indices, use_numba=use_numba)

    total_deg = in_deg + out_deg
    degs, counts = np.unique(total_deg, return_counts=True) if n else (np.array([]), np.array([]))
    hist = {int(d): int(c) for d, c in zip(degs, counts)}

    companies = int(g.is_company.sum())
    return AnalyticsReport(
        node_count=n,
        person_count=n - companies,
        company_count=companies,
        edge_count=g.edge_count,
        scc_count=scc_count,
        wcc_count=wcc_count,
        max_scc_size=max_scc,
        max_wcc_size=max_wcc,
        avg_wcc_size=(n / wcc_count) if wcc_count else 0.0,
        avg_in_degree=(g.edge_count / n) if n else 0.0,
        avg_out_degree=(g.edge_count / n) if n else 0.0,
        max_in_degree=int(in_deg.max()) if n else 0,
        max_out_degree=int(out_deg.max()) if n else 0,
        avg_clustering_coefficient=(float(coeffs.sum()) / n) if n else 0.0,
        self_loop_count=int((g.edge_src == g.edge_dst).sum()),
        degree_histogram=hist,
    )


def impact_by_region(base: OwnershipGraph, filtered: OwnershipGraph) -> dict[str, dict]:
    """Per-region company totals and closures between a graph and its decree subgraph."""
    base_ids = set(base.ids)
    for eid in filtered.ids:
        if eid not in base_ids:
            raise SubgraphError(f"entity {eid!r} not in base graph")
    base_edges = {(a, b): w for a, b, w in base.edge_triples()}
    for a, b, w in filtered.edge_triples():
        if base_edges.get((a, b)) != w:
            raise SubgraphError(f"edge ({a},{b}) not in base graph")

    kept = {e.id for e in filtered.entities if e.is_company}
    out: dict[str, dict] = {}
    for e in base.entities:
        if not e.is_company:
            continue
        region = e.region or "unknown"
        slot = out.setdefault(region, {"total": 0, "closed": 0, "closed_fraction": 0.0})
        slot["total"] += 1
        if e.id not in kept:
            slot["closed"] += 1
    for slot in out.values():
        slot["closed_fraction"] = slot["closed"] / slot["total"]
    return dict(sorted(out.items()))
