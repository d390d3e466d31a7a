"""Core data model for company ownership graphs.

Entities are persons or companies; edges carry the fraction of a company's
shares held by the owning entity. The graph is immutable after construction:
every mutating operation returns a new graph, so concurrent readers never
need locks.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import (
    ConfigError,
    GraphLoadError,
    InsufficientShareError,
    OwnetError,
    SubgraphError,
    UnknownEntityError,
)

PERSON = "person"
COMPANY = "company"

# Incoming share sums may legitimately exceed 1 in registry data; anything
# above 1 + this tolerance is reported as an over-allocation warning.
SHARE_SUM_TOLERANCE = 1e-9

NODE_FIELDS = ["id", "kind", "name", "activity_code", "region", "strategic", "foreign", "public"]
EDGE_FIELDS = ["owner", "owned", "share"]


@dataclass(frozen=True, slots=True)
class Entity:
    """A node of the ownership graph: a person or a company."""

    id: str
    kind: str
    name: str = ""
    activity_code: str | None = None
    region: str | None = None
    strategic: bool = False
    foreign: bool = False
    public: bool = False

    def __post_init__(self):
        if self.kind not in (PERSON, COMPANY):
            raise OwnetError(f"entity {self.id!r}: kind must be 'person' or 'company', got {self.kind!r}")
        if not self.id:
            raise OwnetError("entity id must be non-empty")

    @property
    def is_company(self) -> bool:
        return self.kind == COMPANY


@dataclass(frozen=True, slots=True)
class Transaction:
    """A proposed acquisition: ``buyer`` ends up holding ``share`` of ``target``.

    The resulting ownership replaces any existing (buyer, target) edge; if
    ``seller`` is given, the seller's holding is reduced by ``share``.
    Self-acquisition (buyer == target) is allowed, mirroring self-loops.
    """

    buyer: str
    target: str
    share: float
    seller: str | None = None

    def __post_init__(self):
        if not 0.0 < self.share <= 1.0:
            raise OwnetError(f"transaction share {self.share} out of range (0,1]")

    @classmethod
    def from_dict(cls, d: Mapping) -> "Transaction":
        return cls(
            buyer=str(d["buyer"]),
            target=str(d["target"]),
            share=float(d["share"]),
            seller=(str(d["seller"]) if d.get("seller") not in (None, "") else None),
        )

    def to_dict(self) -> dict:
        out = {"buyer": self.buyer, "target": self.target, "share": self.share}
        if self.seller is not None:
            out["seller"] = self.seller
        return out


@dataclass(frozen=True, slots=True)
class ValidationIssue:
    code: str
    message: str
    entity_id: str | None = None

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "entity_id": self.entity_id}


@dataclass(frozen=True, slots=True)
class ValidationReport:
    """Outcome of :func:`validate`; empty ``errors`` means fit for reasoning."""

    errors: tuple[ValidationIssue, ...]
    warnings: tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "errors": [i.to_dict() for i in self.errors],
            "warnings": [i.to_dict() for i in self.warnings],
        }


class OwnershipGraph:
    """Immutable weighted directed graph of share holdings.

    Entities are kept sorted by id; edges are stored as parallel numpy arrays
    sorted by (owner, owned) with CSR indexes in both directions. At most one
    edge per (owner, owned) pair; company self-loops are allowed.
    """

    __slots__ = (
        "entities",
        "ids",
        "_pos",
        "is_company",
        "edge_src",
        "edge_dst",
        "edge_w",
        "out_indptr",
        "in_indptr",
        "in_order",
    )

    def __init__(self, entities: Iterable[Entity], edges: Iterable[tuple[str, str, float]]):
        self._init_entities(sorted(entities, key=lambda e: e.id))
        triples = list(edges)
        src = np.empty(len(triples), dtype=np.int64)
        dst = np.empty(len(triples), dtype=np.int64)
        w = np.empty(len(triples), dtype=np.float64)
        for k, (owner, owned, share) in enumerate(triples):
            try:
                src[k] = self._pos[owner]
            except KeyError:
                raise UnknownEntityError(owner) from None
            try:
                dst[k] = self._pos[owned]
            except KeyError:
                raise UnknownEntityError(owned) from None
            if not share > 0.0:
                raise OwnetError(f"edge ({owner},{owned}): share {share} must be positive")
            w[k] = share
        self._index_edges(src, dst, w)

    @classmethod
    def from_arrays(cls, entities_sorted: list[Entity], src, dst, w) -> "OwnershipGraph":
        """Fast construction path: entities already sorted by id, edges as
        index arrays into that order. Used by the synthetic generator."""
        obj = object.__new__(cls)
        obj._init_entities(entities_sorted)
        obj._index_edges(np.asarray(src, np.int64), np.asarray(dst, np.int64), np.asarray(w, np.float64))
        return obj

    def _init_entities(self, ents: list[Entity]) -> None:
        self.entities: tuple[Entity, ...] = tuple(ents)
        self.ids: tuple[str, ...] = tuple(e.id for e in ents)
        self._pos: dict[str, int] = {eid: i for i, eid in enumerate(self.ids)}
        if len(self._pos) != len(self.ids):
            seen: set[str] = set()
            for eid in self.ids:
                if eid in seen:
                    raise OwnetError(f"duplicate entity id {eid!r}")
                seen.add(eid)
        self.is_company = np.fromiter((e.is_company for e in ents), dtype=bool, count=len(ents))

    def _index_edges(self, src: np.ndarray, dst: np.ndarray, w: np.ndarray) -> None:
        n = len(self.ids)
        order = np.lexsort((dst, src))
        src, dst, w = src[order], dst[order], w[order]
        if len(src) > 1:
            same = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if same.any():
                k = int(np.flatnonzero(same)[0])
                raise OwnetError(f"duplicate edge ({self.ids[src[k]]},{self.ids[dst[k]]})")
        self.edge_src = src
        self.edge_dst = dst
        self.edge_w = w
        self.out_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=self.out_indptr[1:])
        # in-CSR is a permutation view over the same edge arrays
        self.in_order = np.lexsort((src, dst))
        self.in_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(dst, minlength=n), out=self.in_indptr[1:])

    # -- basic accessors ---------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.ids)

    @property
    def edge_count(self) -> int:
        return len(self.edge_src)

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self._pos

    def entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[self._pos[entity_id]]
        except KeyError:
            raise UnknownEntityError(entity_id) from None

    def index_of(self, entity_id: str) -> int:
        try:
            return self._pos[entity_id]
        except KeyError:
            raise UnknownEntityError(entity_id) from None

    def company_ids(self) -> list[str]:
        return [eid for eid, c in zip(self.ids, self.is_company) if c]

    def out_items(self, entity_id: str) -> list[tuple[str, float]]:
        i = self.index_of(entity_id)
        lo, hi = self.out_indptr[i], self.out_indptr[i + 1]
        return [(self.ids[self.edge_dst[k]], float(self.edge_w[k])) for k in range(lo, hi)]

    def in_items(self, entity_id: str) -> list[tuple[str, float]]:
        i = self.index_of(entity_id)
        lo, hi = self.in_indptr[i], self.in_indptr[i + 1]
        return [
            (self.ids[self.edge_src[self.in_order[k]]], float(self.edge_w[self.in_order[k]]))
            for k in range(lo, hi)
        ]

    def share_of(self, owner: str, owned: str) -> float:
        """Direct share ``owner`` holds of ``owned``; 0.0 if no edge."""
        i = self.index_of(owner)
        j = self.index_of(owned)
        lo, hi = self.out_indptr[i], self.out_indptr[i + 1]
        k = lo + np.searchsorted(self.edge_dst[lo:hi], j)
        if k < hi and self.edge_dst[k] == j:
            return float(self.edge_w[k])
        return 0.0

    def edge_triples(self) -> Iterator[tuple[str, str, float]]:
        for k in range(len(self.edge_src)):
            yield self.ids[self.edge_src[k]], self.ids[self.edge_dst[k]], float(self.edge_w[k])

    def incoming_share_sums(self) -> np.ndarray:
        return np.bincount(self.edge_dst, weights=self.edge_w, minlength=self.node_count)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OwnershipGraph):
            return NotImplemented
        return (
            self.entities == other.entities
            and np.array_equal(self.edge_src, other.edge_src)
            and np.array_equal(self.edge_dst, other.edge_dst)
            and np.array_equal(self.edge_w, other.edge_w)
        )

    def __repr__(self) -> str:
        return f"OwnershipGraph({self.node_count} entities, {self.edge_count} edges)"

    # -- derivation helpers ------------------------------------------------

    def with_updated_edges(self, updates: Mapping[tuple[str, str], float | None]) -> "OwnershipGraph":
        """New graph with (owner, owned) shares replaced; ``None`` removes the edge."""
        pending = dict(updates)
        triples: list[tuple[str, str, float]] = []
        for owner, owned, share in self.edge_triples():
            key = (owner, owned)
            if key in pending:
                new = pending.pop(key)
                if new is not None:
                    triples.append((owner, owned, new))
            else:
                triples.append((owner, owned, share))
        for (owner, owned), share in pending.items():
            if share is not None:
                triples.append((owner, owned, share))
        return OwnershipGraph(self.entities, triples)

    def induced_subgraph(self, keep_ids: Iterable[str]) -> "OwnershipGraph":
        keep = set(keep_ids)
        ents = [e for e in self.entities if e.id in keep]
        triples = [(a, b, w) for a, b, w in self.edge_triples() if a in keep and b in keep]
        return OwnershipGraph(ents, triples)


# -- loading and saving ------------------------------------------------------


def _parse_bool(raw: str, row: int, column: str) -> bool:
    v = raw.strip().lower()
    if v in ("true", "1", "yes"):
        return True
    if v in ("false", "0", "no", ""):
        return False
    raise GraphLoadError(f"column {column!r}: expected true/false, got {raw!r}", row)


def load_graph(nodes_source, edges_source) -> OwnershipGraph:
    """Build a graph from two CSV streams (see NODE_FIELDS / EDGE_FIELDS).

    Raises :class:`GraphLoadError` with the offending row number on parse
    failures, duplicate edges, unknown entity ids, and shares outside (0,1].
    """
    entities: list[Entity] = []
    seen_ids: set[str] = set()
    reader = csv.DictReader(nodes_source)
    if reader.fieldnames is None or "id" not in reader.fieldnames:
        raise GraphLoadError("nodes CSV missing header with 'id' column")
    for row_no, row in enumerate(reader, start=2):
        eid = (row.get("id") or "").strip()
        if not eid:
            raise GraphLoadError("empty entity id", row_no)
        if eid in seen_ids:
            raise GraphLoadError(f"duplicate entity id {eid!r}", row_no)
        seen_ids.add(eid)
        kind = (row.get("kind") or "").strip().lower()
        if kind not in (PERSON, COMPANY):
            raise GraphLoadError(f"kind must be person or company, got {row.get('kind')!r}", row_no)
        entities.append(
            Entity(
                id=eid,
                kind=kind,
                name=(row.get("name") or "").strip(),
                activity_code=(row.get("activity_code") or "").strip() or None,
                region=(row.get("region") or "").strip() or None,
                strategic=_parse_bool(row.get("strategic") or "", row_no, "strategic"),
                foreign=_parse_bool(row.get("foreign") or "", row_no, "foreign"),
                public=_parse_bool(row.get("public") or "", row_no, "public"),
            )
        )

    triples: list[tuple[str, str, float]] = []
    seen_edges: set[tuple[str, str]] = set()
    ereader = csv.DictReader(edges_source)
    if ereader.fieldnames is None or "owner" not in ereader.fieldnames:
        raise GraphLoadError("edges CSV missing header with 'owner' column")
    for row_no, row in enumerate(ereader, start=2):
        owner = (row.get("owner") or "").strip()
        owned = (row.get("owned") or "").strip()
        try:
            share = float(row.get("share") or "")
        except ValueError:
            raise GraphLoadError(f"unparseable share {row.get('share')!r}", row_no) from None
        if owner not in seen_ids:
            raise GraphLoadError(f"unknown entity id {owner!r}", row_no)
        if owned not in seen_ids:
            raise GraphLoadError(f"unknown entity id {owned!r}", row_no)
        if not 0.0 < share <= 1.0:
            raise GraphLoadError(f"share {share} out of range (0,1]", row_no)
        if (owner, owned) in seen_edges:
            raise GraphLoadError(f"duplicate edge ({owner},{owned})", row_no)
        seen_edges.add((owner, owned))
        triples.append((owner, owned, share))

    return OwnershipGraph(entities, triples)


def load_graph_from_paths(nodes_path, edges_path) -> OwnershipGraph:
    with open(nodes_path, newline="") as nf, open(edges_path, newline="") as ef:
        return load_graph(nf, ef)


def save_graph(g: OwnershipGraph, nodes_sink, edges_sink) -> None:
    """Write the graph as the two CSVs; shares at full precision (repr)."""
    nw = csv.writer(nodes_sink)
    nw.writerow(NODE_FIELDS)
    for e in g.entities:
        nw.writerow(
            [
                e.id,
                e.kind,
                e.name,
                e.activity_code or "",
                e.region or "",
                "true" if e.strategic else "false",
                "true" if e.foreign else "false",
                "true" if e.public else "false",
            ]
        )
    ew = csv.writer(edges_sink)
    ew.writerow(EDGE_FIELDS)
    for owner, owned, share in g.edge_triples():
        ew.writerow([owner, owned, repr(share)])


def save_graph_to_paths(g: OwnershipGraph, nodes_path, edges_path) -> None:
    with open(nodes_path, "w", newline="") as nf, open(edges_path, "w", newline="") as ef:
        save_graph(g, nf, ef)


def graph_to_csv_strings(g: OwnershipGraph) -> tuple[str, str]:
    nbuf, ebuf = io.StringIO(), io.StringIO()
    save_graph(g, nbuf, ebuf)
    return nbuf.getvalue(), ebuf.getvalue()


# -- validation ---------------------------------------------------------------


def validate(g: OwnershipGraph) -> ValidationReport:
    """Report every invariant violation, deterministically ordered by entity id."""
    errors: list[ValidationIssue] = []
    warnings: list[ValidationIssue] = []

    for owner, owned, share in g.edge_triples():
        if not g.entity(owned).is_company:
            errors.append(
                ValidationIssue("person_owned", f"person cannot be owned: edge ({owner},{owned})", owned)
            )
        if share > 1.0:
            errors.append(
                ValidationIssue("share_range", f"edge ({owner},{owned}): share {share} out of range (0,1]", owned)
            )
    for e in g.entities:
        if e.kind == PERSON and e.activity_code:
            errors.append(
                ValidationIssue("person_activity", f"person {e.id} cannot carry an activity code", e.id)
            )

    sums = g.incoming_share_sums()
    degree = np.diff(g.out_indptr) + np.diff(g.in_indptr)
    for i, eid in enumerate(g.ids):
        if sums[i] > 1.0 + SHARE_SUM_TOLERANCE:
            warnings.append(
                ValidationIssue("over_allocated", f"company {eid} incoming share {sums[i]:.2f} > 1", eid)
            )
        if degree[i] == 0:
            warnings.append(ValidationIssue("isolated", f"entity {eid} is isolated", eid))

    errors.sort(key=lambda i: (i.entity_id or "", i.code, i.message))
    warnings.sort(key=lambda i: (i.entity_id or "", i.code, i.message))
    return ValidationReport(tuple(errors), tuple(warnings))


# -- transactions -------------------------------------------------------------


def apply_transaction(g: OwnershipGraph, t: Transaction) -> OwnershipGraph:
    """Return a new graph where (buyer, target) holds exactly ``t.share``.

    Replacement semantics: the transaction asserts the resulting ownership
    fact, it does not add to an existing holding. With a seller, the seller's
    edge is reduced by ``t.share`` and removed when it reaches zero.
    """
    if t.buyer not in g:
        raise UnknownEntityError(t.buyer)
    if t.target not in g:
        raise UnknownEntityError(t.target)
    if not g.entity(t.target).is_company:
        raise OwnetError(f"cannot acquire shares of person {t.target!r}")

    updates: dict[tuple[str, str], float | None] = {(t.buyer, t.target): t.share}
    if t.seller is not None:
        if t.seller not in g:
            raise UnknownEntityError(t.seller)
        held = g.share_of(t.seller, t.target)
        if held < t.share - 1e-12:
            raise InsufficientShareError(f"seller {t.seller} holds {held:.2f} < {t.share:.2f}")
        remaining = held - t.share
        updates[(t.seller, t.target)] = remaining if remaining > 1e-12 else None
    return g.with_updated_edges(updates)


def apply_transactions(g: OwnershipGraph, ts: Iterable[Transaction]) -> OwnershipGraph:
    for t in ts:
        g = apply_transaction(g, t)
    return g


# -- decree filtering ---------------------------------------------------------


@dataclass(frozen=True)
class RegionalOverride:
    allow: frozenset[str] = frozenset()
    forbid: frozenset[str] = frozenset()


@dataclass(frozen=True)
class DecreeConfig:
    """Allowed activity-code prefixes plus per-region exceptions."""

    allowed_prefixes: frozenset[str]
    regional_overrides: Mapping[str, RegionalOverride] = field(default_factory=dict)

    @classmethod
    def from_json(cls, text: str) -> "DecreeConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"decree config is not valid JSON: {exc}") from exc
        overrides = {
            region: RegionalOverride(
                allow=frozenset(o.get("allow", [])),
                forbid=frozenset(o.get("forbid", [])),
            )
            for region, o in raw.get("regional_overrides", {}).items()
        }
        return cls(frozenset(raw.get("allowed_prefixes", [])), overrides)

    @classmethod
    def from_path(cls, path) -> "DecreeConfig":
        with open(path) as fh:
            return cls.from_json(fh.read())


def _matches(code: str, prefixes: Iterable[str]) -> bool:
    return any(code.startswith(p) for p in prefixes)


def company_allowed(e: Entity, cfg: DecreeConfig) -> bool:
    """Decide whether a company stays open under the decree configuration.

    Regional forbid beats regional allow; any regional match beats the
    national list. Companies without an activity code are closed.
    """
    if not e.activity_code:
        return False
    override = cfg.regional_overrides.get(e.region or "")
    if override is not None:
        if _matches(e.activity_code, override.forbid):
            return False
        if _matches(e.activity_code, override.allow):
            return True
    return _matches(e.activity_code, cfg.allowed_prefixes)


def filter_by_activity(
    g: OwnershipGraph,
    allowed_codes: Iterable[str],
    regional_overrides: Mapping[str, RegionalOverride] | None = None,
) -> OwnershipGraph:
    """Decree subgraph: open companies, persons owning at least one of them,
    and the edges connecting retained endpoints."""
    cfg = DecreeConfig(frozenset(allowed_codes), dict(regional_overrides or {}))
    keep: set[str] = {e.id for e in g.entities if e.is_company and company_allowed(e, cfg)}
    for e in g.entities:
        if e.kind == PERSON and any(owned in keep for owned, _ in g.out_items(e.id)):
            keep.add(e.id)
    return g.induced_subgraph(keep)


def filter_by_decree(g: OwnershipGraph, cfg: DecreeConfig) -> OwnershipGraph:
    return filter_by_activity(g, cfg.allowed_prefixes, cfg.regional_overrides)
