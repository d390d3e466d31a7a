"""Conglomerate decomposition via the symmetric ownership vicinity relation.

Companies are close when their mutual integrated ownership (in either
direction, or through a shared third party - possibly a person) exceeds the
conglomerate threshold; conglomerates are the connected groups of the
resulting pair graph.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DivergentCycleError
from .model import OwnershipGraph
from .ownership import integrated_ownership
from .parallel import map_sources

DEFAULT_EPSILON = 0.5


@dataclass(frozen=True)
class ConglomeratePartition:
    """Every company mapped to exactly one conglomerate (singletons included)."""

    epsilon: float
    assignment: dict[str, str]
    conglomerates: dict[str, tuple[str, ...]]

    def members(self, cong_id: str) -> tuple[str, ...]:
        return self.conglomerates[cong_id]

    def nontrivial(self) -> dict[str, tuple[str, ...]]:
        return {cid: m for cid, m in self.conglomerates.items() if len(m) >= 2}

    def to_dict(self) -> dict:
        nontrivial = self.nontrivial()
        singles = sorted(cid for cid, m in self.conglomerates.items() if len(m) == 1)
        return {
            "epsilon": self.epsilon,
            "conglomerates": [
                {"id": cid, "members": list(m)} for cid, m in sorted(nontrivial.items())
            ],
            "singletons": singles,
        }

    def to_csv(self) -> str:
        lines = ["company_id,conglomerate_id"]
        lines += [f"{company},{cong}" for company, cong in sorted(self.assignment.items())]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ConglomerateIndicators:
    """Descriptive indicators over non-trivial (size >= 2) conglomerates."""

    conglomerate_count: int
    avg_companies_per_cong: float
    avg_activities_per_cong: float
    max_cong_size: int
    max_activities_per_cong: int
    avg_regions_per_cong: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _ownership_rows(g: OwnershipGraph, use_numba: bool | None = None) -> dict[str, dict[str, float]]:
    """Integrated-ownership row per entity (fanned out across OWNET_THREADS
    workers); sources whose iteration fails to converge are excluded from the
    vicinity computation."""
    vecs = map_sources(lambda eid: integrated_ownership(g, eid, use_numba=use_numba), g.ids)
    return {eid: vec.values for eid, vec in vecs.items() if vec.converged}


def _undirected(rows: dict[str, dict[str, float]], a: str, b: str) -> float:
    forward = rows.get(a, {}).get(b, 0.0)
    backward = rows.get(b, {}).get(a, 0.0)
    return max(forward, backward)


def undirected_ownership(g: OwnershipGraph, x: str, y: str, eps: float,
                         use_numba: bool | None = None) -> float:
    """Symmetric integrated ownership between two companies: the larger of
    the two directed values. Raises DivergentCycleError when either direction
    fails to converge."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    for eid in (x, y):
        if not g.entity(eid).is_company:
            raise ValueError(f"{eid!r} is not a company")
    vx = integrated_ownership(g, x, use_numba=use_numba)
    vy = integrated_ownership(g, y, use_numba=use_numba)
    if not (vx.converged and vy.converged):
        raise DivergentCycleError()
    return max(vx.value(y), vy.value(x))


def vicinity_pairs(g: OwnershipGraph, eps: float,
                   use_numba: bool | None = None) -> set[frozenset[str]]:
    """Unordered company pairs that are close at threshold eps: mutual
    ownership above eps, or a third party (company or person) above eps
    toward both."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    rows = _ownership_rows(g, use_numba=use_numba)
    company = {eid for eid, c in zip(g.ids, g.is_company) if c}
    reverse: dict[str, set[str]] = {}
    for a, vals in rows.items():
        for b in vals:
            reverse.setdefault(b, set()).add(a)

    pairs: set[frozenset[str]] = set()
    for z in g.ids:
        candidates = set(rows.get(z, ())) | reverse.get(z, set())
        near = sorted(
            x for x in candidates
            if x != z and x in company and _undirected(rows, z, x) > eps
        )
        if z in company:
            for x in near:
                pairs.add(frozenset((z, x)))
        for i in range(len(near)):
            for j in range(i + 1, len(near)):
                pairs.add(frozenset((near[i], near[j])))
    return pairs


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the lexicographically smallest id as representative
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def conglomerates(g: OwnershipGraph, eps: float = DEFAULT_EPSILON,
                  use_numba: bool | None = None) -> ConglomeratePartition:
    """Partition all companies by the transitive closure of vicinity."""
    company_ids = g.company_ids()
    uf = _UnionFind(company_ids)
    for pair in vicinity_pairs(g, eps, use_numba=use_numba):
        a, b = sorted(pair)
        uf.union(a, b)

    groups: dict[str, list[str]] = {}
    for c in company_ids:
        groups.setdefault(uf.find(c), []).append(c)
    conglomerate_map: dict[str, tuple[str, ...]] = {}
    assignment: dict[str, str] = {}
    for members in groups.values():
        members.sort()
        cid = members[0]
        conglomerate_map[cid] = tuple(members)
        for m in members:
            assignment[m] = cid
    return ConglomeratePartition(epsilon=eps, assignment=assignment, conglomerates=conglomerate_map)


def conglomerate_indicators(p: ConglomeratePartition, g: OwnershipGraph) -> ConglomerateIndicators:
    """Indicator table over non-trivial conglomerates: sizes plus distinct
    activity codes and regions among members."""
    nontrivial = p.nontrivial()
    if not nontrivial:
        return ConglomerateIndicators(0, 0.0, 0.0, 0, 0, 0.0)
    sizes: list[int] = []
    activities: list[int] = []
    regions: list[int] = []
    for members in nontrivial.values():
        sizes.append(len(members))
        acts = {g.entity(m).activity_code for m in members if g.entity(m).activity_code}
        regs = {g.entity(m).region for m in members if g.entity(m).region}
        activities.append(len(acts))
        regions.append(len(regs))
    count = len(sizes)
    return ConglomerateIndicators(
        conglomerate_count=count,
        avg_companies_per_cong=sum(sizes) / count,
        avg_activities_per_cong=sum(activities) / count,
        max_cong_size=max(sizes),
        max_activities_per_cong=max(activities),
        avg_regions_per_cong=sum(regions) / count,
    )
