"""Synthetic ownership graphs with a scale-free degree profile.

Preferential attachment over companies gives the heavy-tailed in-degree;
a Pareto-distributed out-degree for a minority of "holding" nodes gives the
heavy-tailed out-degree. Incoming shares per company are drawn to sum below
1, and back edges (the only way cycles arise) always carry shares below 1,
so no cycle can reach a unit weight product and every ownership computation
converges by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .model import COMPANY, PERSON, Entity, OwnershipGraph

DEFAULT_ACTIVITY_CODES = (
    "10.11", "20.14", "25.62", "35.11", "41.20", "43.21", "45.20", "46.19",
    "47.11", "49.41", "52.10", "56.10", "62.01", "64.20", "68.20", "70.22",
    "71.12", "82.99", "86.21", "96.02",
)

_HUB_PROB = 0.12          # fraction of nodes drawing a heavy-tailed out-degree
_BACK_EDGE_PROB = 0.02    # chance an older company buys into the new one
_ISLAND_PROB = 0.22       # chance a company seeds a new weak component
_MAX_OUT_DEGREE = 5_000
_MAX_INCOMING_TOTAL = 0.98  # keeps every share strictly below 1


@dataclass(frozen=True)
class GeneratorConfig:
    node_count: int
    person_fraction: float = 0.35
    attachment_exponent: float = 2.5
    share_distribution: str = "dirichlet_per_company"
    seed: int = 0
    region_count: int = 20
    activity_codes: tuple[str, ...] = field(default=DEFAULT_ACTIVITY_CODES)

    def __post_init__(self):
        if self.node_count < 1:
            raise ConfigError("node_count must be >= 1")
        if not 0.0 <= self.person_fraction <= 1.0:
            raise ConfigError("person_fraction must be in [0,1]")
        if self.person_fraction >= 1.0 and self.node_count > 1:
            raise ConfigError("person_fraction=1 leaves no companies to own")
        if self.attachment_exponent <= 1.0:
            raise ConfigError("attachment_exponent must exceed 1")
        if self.share_distribution not in ("uniform", "dirichlet_per_company"):
            raise ConfigError(f"unknown share_distribution {self.share_distribution!r}")
        if self.region_count < 1:
            raise ConfigError("region_count must be >= 1")
        if not self.activity_codes:
            raise ConfigError("activity_codes must be non-empty")


def generate(cfg: GeneratorConfig) -> OwnershipGraph:
    """Deterministic for a fixed config; passes validation with zero errors."""
    rng = random.Random(cfg.seed)
    alpha = cfg.attachment_exponent - 1.0

    # kinds in creation order; the first node anchors attachment as a company
    kinds = [COMPANY]
    for _ in range(1, cfg.node_count):
        kinds.append(PERSON if rng.random() < cfg.person_fraction else COMPANY)
    n_companies = kinds.count(COMPANY)

    # creation order -> sorted-id index (all C ids precede all P ids)
    sorted_idx = np.empty(cfg.node_count, dtype=np.int64)
    company_no = person_no = 0
    entities: list[Entity] = [None] * cfg.node_count  # type: ignore[list-item]
    for i, kind in enumerate(kinds):
        if kind == COMPANY:
            eid = f"C{company_no:07d}"
            pos = company_no
            company_no += 1
            entities[pos] = Entity(
                id=eid,
                kind=COMPANY,
                activity_code=rng.choice(cfg.activity_codes),
                region=f"R{rng.randrange(cfg.region_count):02d}",
            )
        else:
            eid = f"P{person_no:07d}"
            pos = n_companies + person_no
            person_no += 1
            entities[pos] = Entity(id=eid, kind=PERSON, region=f"R{rng.randrange(cfg.region_count):02d}")
        sorted_idx[i] = pos

    # Weak components grow as islands: a node wires entirely inside the island
    # of its (preferentially picked) first target, so component sizes follow a
    # rich-get-richer law: one large component plus a long tail of small ones.
    src: list[int] = []
    dst: list[int] = []
    global_pool: list[int] = []          # company indices, repeated by in-degree + 1
    island_pools: list[list[int]] = []   # same, but per island
    island_companies: list[int] = []     # distinct companies per island
    island_of: dict[int, int] = {}

    for i, kind in enumerate(kinds):
        u = int(sorted_idx[i])
        starts_island = kind == COMPANY and (not global_pool or rng.random() < _ISLAND_PROB)
        if starts_island:
            island_of[u] = len(island_pools)
            island_pools.append([u])
            island_companies.append(1)
            global_pool.append(u)
            continue

        first = global_pool[rng.randrange(len(global_pool))]
        isl = island_of[first]
        pool = island_pools[isl]
        m = 1
        if rng.random() < _HUB_PROB:
            m = min(1 + int(rng.paretovariate(alpha)), island_companies[isl], _MAX_OUT_DEGREE)
        chosen: set[int] = {first}
        attempts = 0
        while len(chosen) < m and attempts < 4 * m + 16:
            attempts += 1
            t = pool[rng.randrange(len(pool))]
            if t != u and t not in chosen:
                chosen.add(t)
        for t in sorted(chosen):
            src.append(u)
            dst.append(t)
            pool.append(t)
            global_pool.append(t)
        island_of[u] = isl
        if kind == COMPANY:
            # first in-edge of the new company, so it can never be a duplicate
            if rng.random() < _BACK_EDGE_PROB:
                owner = pool[rng.randrange(len(pool))]
                if owner != u:
                    src.append(owner)
                    dst.append(u)
            pool.append(u)
            global_pool.append(u)
            island_companies[isl] += 1

    esrc = np.asarray(src, dtype=np.int64)
    edst = np.asarray(dst, dtype=np.int64)
    weights = _draw_shares(cfg, esrc, edst)

    # rejection step: a unit-product cycle needs a unit-share edge
    if len(weights) and weights.max() >= 1.0:
        raise AssertionError("generator produced a share >= 1")

    return OwnershipGraph.from_arrays(entities, esrc, edst, weights)


def _draw_shares(cfg: GeneratorConfig, esrc: np.ndarray, edst: np.ndarray) -> np.ndarray:
    nrng = np.random.default_rng(cfg.seed)
    m = len(esrc)
    if m == 0:
        return np.empty(0, dtype=np.float64)

    if cfg.share_distribution == "uniform":
        raw = nrng.uniform(0.05, 0.95, size=m)
        sums = np.bincount(edst, weights=raw)
        factor = np.ones_like(sums)
        over = sums > _MAX_INCOMING_TOTAL
        factor[over] = _MAX_INCOMING_TOTAL / sums[over]
        return np.maximum(raw * factor[edst], 1e-12)

    # dirichlet_per_company: split a per-company total among its owners
    draws = np.maximum(nrng.standard_exponential(m), 1e-12)
    group_sum = np.bincount(edst, weights=draws)
    totals = nrng.uniform(0.3, _MAX_INCOMING_TOTAL, size=len(group_sum))
    shares = draws / group_sum[edst] * totals[edst]
    return np.maximum(shares, 1e-12)
