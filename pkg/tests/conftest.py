"""Shared fixtures: worked-example graphs and independent brute-force oracles.

The oracles deliberately avoid the library's own algorithms: reachability by
boolean matrix closure, ownership by a dense linear solve, control by chaotic
re-scanning, conglomerates by explicit transitive closure.
"""

from __future__ import annotations

import math
import random
from pathlib import Path

import numpy as np
import pytest

from ownet.model import Entity, OwnershipGraph, load_graph_from_paths

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str) -> OwnershipGraph:
    return load_graph_from_paths(FIXTURES / f"{name}.nodes.csv", FIXTURES / f"{name}.edges.csv")


@pytest.fixture(scope="session")
def fig8():
    return load_fixture("fig8")


@pytest.fixture(scope="session")
def fig9():
    return load_fixture("fig9")


@pytest.fixture(scope="session")
def fig10():
    return load_fixture("fig10")


@pytest.fixture(scope="session")
def fig11():
    return load_fixture("fig11")


@pytest.fixture(scope="session")
def fig12():
    return load_fixture("fig12")


# -- random graph builders ------------------------------------------------------


def random_graph(
    seed: int,
    max_nodes: int = 8,
    person_prob: float = 0.3,
    max_extra_edges: int | None = None,
    incoming_cap: float = 0.95,
) -> OwnershipGraph:
    """Random sparse graph whose per-company incoming sums stay below
    ``incoming_cap`` (< 1), so every ownership series converges from every
    source and the dense linear solve is well-posed."""
    rng = random.Random(seed)
    n = rng.randint(1, max_nodes)
    entities = []
    for i in range(n):
        kind = "person" if rng.random() < person_prob else "company"
        entities.append(Entity(id=f"n{i}", kind=kind))
    companies = [e.id for e in entities if e.kind == "company"]
    edges: dict[tuple[str, str], float] = {}
    if companies:
        m = rng.randint(0, max_extra_edges if max_extra_edges is not None else n)
        for _ in range(m):
            owner = entities[rng.randrange(n)].id
            owned = companies[rng.randrange(len(companies))]
            if (owner, owned) in edges:
                continue
            edges[(owner, owned)] = rng.uniform(0.05, 0.95)
    # scale incoming sums below the cap
    incoming: dict[str, float] = {}
    for (_, owned), w in edges.items():
        incoming[owned] = incoming.get(owned, 0.0) + w
    for key in list(edges):
        total = incoming[key[1]]
        if total > incoming_cap:
            edges[key] *= incoming_cap / total
    triples = [(a, b, w) for (a, b), w in sorted(edges.items())]
    return OwnershipGraph(entities, triples)


# -- reachability / component oracles --------------------------------------------


def reachability_matrix(g: OwnershipGraph) -> np.ndarray:
    n = g.node_count
    adj = np.zeros((n, n), dtype=bool)
    adj[g.edge_src, g.edge_dst] = True
    reach = adj.copy()
    np.fill_diagonal(reach, True)
    for _ in range(n):
        new = reach | (reach @ reach)
        if np.array_equal(new, reach):
            break
        reach = new
    return reach


def brute_scc_sets(g: OwnershipGraph) -> set[frozenset[str]]:
    reach = reachability_matrix(g)
    mutual = reach & reach.T
    return {
        frozenset(g.ids[j] for j in np.flatnonzero(mutual[i]))
        for i in range(g.node_count)
    }


def brute_wcc_sets(g: OwnershipGraph) -> set[frozenset[str]]:
    n = g.node_count
    adj = np.zeros((n, n), dtype=bool)
    adj[g.edge_src, g.edge_dst] = True
    adj |= adj.T
    np.fill_diagonal(adj, True)
    reach = adj.copy()
    for _ in range(n):
        new = reach | (reach @ reach)
        if np.array_equal(new, reach):
            break
        reach = new
    return {frozenset(g.ids[j] for j in np.flatnonzero(reach[i])) for i in range(n)}


# -- ownership oracle --------------------------------------------------------------


def linear_solve_ownership(g: OwnershipGraph, s: str) -> dict[str, float]:
    """Dense solve of v = d_s + v W' over the whole graph (no reachability
    restriction, no iteration)."""
    n = g.node_count
    s_idx = g.index_of(s)
    W = np.zeros((n, n))
    W[g.edge_src, g.edge_dst] = g.edge_w
    d = W[s_idx].copy()
    Wp = W.copy()
    Wp[s_idx, :] = 0.0
    # v (I - Wp) = d  =>  (I - Wp)^T v^T = d^T
    v = np.linalg.solve(np.eye(n) - Wp.T, d)
    return {g.ids[i]: float(v[i]) for i in range(n) if v[i] > 1e-15}


# -- control oracle ----------------------------------------------------------------


def brute_control_closure(g: OwnershipGraph, seed_ids: list[str], shuffle_seed: int = 0) -> set[str]:
    """Chaotic-iteration closure: rescan all companies in a shuffled order
    until stable. The least fixed point is order-independent, so any schedule
    must land on the same set."""
    rng = random.Random(shuffle_seed)
    members = set(seed_ids)
    company_ids = [e.id for e in g.entities if e.kind == "company"]
    changed = True
    while changed:
        changed = False
        order = company_ids[:]
        rng.shuffle(order)
        for z in order:
            if z in members:
                continue
            total = math.fsum(w for owner, w in g.in_items(z) if owner in members)
            if total > 0.5:
                members.add(z)
                changed = True
    return members


# -- conglomerate oracle --------------------------------------------------------------


def brute_conglomerates(g: OwnershipGraph, eps: float) -> set[frozenset[str]]:
    """Explicit pair relation from the dense ownership oracle, then Warshall
    transitive closure over companies."""
    rows = {eid: linear_solve_ownership(g, eid) for eid in g.ids}

    def undirected(a: str, b: str) -> float:
        return max(rows[a].get(b, 0.0), rows[b].get(a, 0.0))

    companies = [e.id for e in g.entities if e.kind == "company"]
    idx = {c: i for i, c in enumerate(companies)}
    n = len(companies)
    close = np.eye(n, dtype=bool)
    for i, x in enumerate(companies):
        for j in range(i + 1, n):
            y = companies[j]
            related = undirected(x, y) > eps
            if not related:
                for z in g.ids:
                    if z != x and z != y and undirected(z, x) > eps and undirected(z, y) > eps:
                        related = True
                        break
            close[i, j] = close[j, i] = related
    for k in range(n):
        for i in range(n):
            if close[i, k]:
                close[i] |= close[k]
    groups = set()
    for i in range(n):
        groups.add(frozenset(companies[j] for j in np.flatnonzero(close[i])))
    return groups
