"""Takeover screening: check, limit, protection, collusion and cautious modes.

All verdicts reduce to control queries on a transaction-adjusted graph:
a takeover exists when some foreign entity (or the foreign coalition)
controls a strategic company. Every operation is pure; the scenario's staged
transactions are replayed before the candidate transaction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .control import CONTROL_THRESHOLD, ControlResult, controls, joint_controls
from .errors import ConfigError, OwnetError, UnknownEntityError
from .model import (
    SHARE_SUM_TOLERANCE,
    OwnershipGraph,
    Transaction,
    apply_transaction,
    apply_transactions,
)

DEFAULT_LIMIT_QUANTUM = 1e-4
DEFAULT_PROTECTION_QUANTUM = 0.01


@dataclass(frozen=True)
class Scenario:
    """Screening context: strategic companies S, foreign entities under
    investigation F, publicly controlled entities P, staged transactions."""

    strategic: frozenset[str]
    foreign: frozenset[str]
    public: frozenset[str] = frozenset()
    staged: tuple[Transaction, ...] = ()

    def __post_init__(self):
        overlap = self.public & (self.foreign | self.strategic)
        if overlap:
            raise ConfigError(f"public set must be disjoint from F and S: {sorted(overlap)}")

    @classmethod
    def from_dict(cls, d: Mapping) -> "Scenario":
        return cls(
            strategic=frozenset(map(str, d.get("strategic", []))),
            foreign=frozenset(map(str, d.get("foreign", []))),
            public=frozenset(map(str, d.get("public", []))),
            staged=tuple(Transaction.from_dict(t) for t in d.get("staged", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_graph_flags(cls, g: OwnershipGraph) -> "Scenario":
        return cls(
            strategic=frozenset(e.id for e in g.entities if e.strategic),
            foreign=frozenset(e.id for e in g.entities if e.foreign),
            public=frozenset(e.id for e in g.entities if e.public),
        )

    def to_dict(self) -> dict:
        return {
            "strategic": sorted(self.strategic),
            "foreign": sorted(self.foreign),
            "public": sorted(self.public),
            "staged": [t.to_dict() for t in self.staged],
        }

    def with_staged(self, staged: Iterable[Transaction]) -> "Scenario":
        return Scenario(self.strategic, self.foreign, self.public, tuple(staged))


@dataclass(frozen=True)
class Witness:
    foreign: str | tuple[str, ...]
    strategic: str
    control_share: float

    def to_dict(self) -> dict:
        f = list(self.foreign) if isinstance(self.foreign, tuple) else self.foreign
        return {"foreign": f, "strategic": self.strategic, "control_share": self.control_share}


@dataclass(frozen=True)
class GpVerdict:
    takeover: bool
    witnesses: tuple[Witness, ...]
    graph_after: OwnershipGraph

    def to_dict(self) -> dict:
        return {
            "takeover": self.takeover,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


@dataclass(frozen=True)
class Acquisition:
    holder: str
    target: str
    delta: float

    def to_dict(self) -> dict:
        return {"holder": self.holder, "target": self.target, "delta": self.delta}


@dataclass(frozen=True)
class CandidatePlan:
    acquisitions: tuple[Acquisition, ...]
    total: float
    intermediary: str | None = None

    def to_dict(self) -> dict:
        return {
            "acquisitions": [a.to_dict() for a in self.acquisitions],
            "total": self.total,
            "intermediary": self.intermediary,
        }


@dataclass(frozen=True)
class ProtectionPlan:
    """Chosen beef-up acquisitions plus, per strategic company, the candidate
    plans that were considered (so callers can prefer an intermediary route)."""

    acquisitions: tuple[Acquisition, ...]
    residual_risk: bool
    options: dict[str, tuple[CandidatePlan, ...]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "acquisitions": [a.to_dict() for a in self.acquisitions],
            "residual_risk": self.residual_risk,
            "options": {
                s: [c.to_dict() for c in cands] for s, cands in sorted(self.options.items())
            },
        }


def _check_scenario(g: OwnershipGraph, sc: Scenario) -> None:
    for eid in sorted(sc.strategic | sc.foreign | sc.public):
        if eid not in g:
            raise UnknownEntityError(eid)
    for s in sorted(sc.strategic):
        if not g.entity(s).is_company:
            raise OwnetError(f"strategic set may contain only companies: {s!r}")


def _stage(g: OwnershipGraph, sc: Scenario) -> OwnershipGraph:
    return apply_transactions(g, sc.staged)


def _individual_witnesses(g: OwnershipGraph, sc: Scenario) -> list[Witness]:
    witnesses = []
    for f in sorted(sc.foreign):
        res = controls(g, f)
        for s in sorted(sc.strategic & res.controlled):
            witnesses.append(Witness(f, s, res.control_share[s]))
    return witnesses


def gp_check(g: OwnershipGraph, sc: Scenario, t: Transaction | None) -> GpVerdict:
    """Does ``t`` (after the staged transactions) let any foreign entity
    control a strategic company?"""
    _check_scenario(g, sc)
    g_after = _stage(g, sc)
    if t is not None:
        g_after = apply_transaction(g_after, t)
    witnesses = _individual_witnesses(g_after, sc)
    return GpVerdict(takeover=bool(witnesses), witnesses=tuple(witnesses), graph_after=g_after)


def collusion_gp_check(g: OwnershipGraph, sc: Scenario, t: Transaction | None) -> GpVerdict:
    """As gp_check, but the whole foreign set acts as one colluding block."""
    _check_scenario(g, sc)
    if not sc.foreign:
        raise ConfigError("collusion check needs a non-empty foreign set")
    g_after = _stage(g, sc)
    if t is not None:
        g_after = apply_transaction(g_after, t)
    coalition = tuple(sorted(sc.foreign))
    res = joint_controls(g_after, coalition)
    witnesses = tuple(
        Witness(coalition, s, res.control_share[s]) for s in sorted(sc.strategic & res.controlled)
    )
    return GpVerdict(takeover=bool(witnesses), witnesses=witnesses, graph_after=g_after)


def residual_shares(g: OwnershipGraph) -> dict[str, float]:
    """Unallocated incoming share per company (clamped at 0 for
    over-allocated companies; sums within tolerance of 1 count as full)."""
    sums = g.incoming_share_sums()
    out: dict[str, float] = {}
    for i, eid in enumerate(g.ids):
        if not g.is_company[i]:
            continue
        r = 1.0 - float(sums[i])
        if r > SHARE_SUM_TOLERANCE:
            out[eid] = r
    return out


def assume_residuals_owned_by(g: OwnershipGraph, f: str) -> OwnershipGraph:
    """Worst-case completion: every company's unaccounted share is assigned
    to ``f`` (added to any existing holding, capped at 1)."""
    g.index_of(f)
    updates: dict[tuple[str, str], float | None] = {}
    for y, r in residual_shares(g).items():
        updates[(f, y)] = min(1.0, g.share_of(f, y) + r)
    return g.with_updated_edges(updates)


def cautious_gp_check(g: OwnershipGraph, sc: Scenario, t: Transaction | None, f: str) -> GpVerdict:
    """gp_check under the assumption that all missing ownership belongs to ``f``."""
    _check_scenario(g, sc)
    if f not in sc.foreign:
        raise ConfigError(f"cautious check: {f!r} is not in the foreign set")
    g_cautious = assume_residuals_owned_by(g, f)
    narrowed = Scenario(sc.strategic, frozenset({f}), sc.public, sc.staged)
    return gp_check(g_cautious, narrowed, t)


@dataclass(frozen=True)
class LimitResult:
    max_share: float
    binding_strategic: str | None

    def to_dict(self) -> dict:
        return {"max_share": self.max_share, "binding_strategic": self.binding_strategic}


def gp_limit(
    g: OwnershipGraph,
    sc: Scenario,
    buyer: str,
    target: str,
    quantum: float = DEFAULT_LIMIT_QUANTUM,
) -> LimitResult:
    """Largest grid share ``buyer`` may acquire of ``target`` without any
    foreign entity controlling a strategic company.

    Control sets are monotone in edge weights, so the takeover predicate is a
    threshold function of the acquired share and the grid can be bisected.
    """
    if quantum <= 0:
        raise ConfigError("quantum must be positive")
    _check_scenario(g, sc)
    base = gp_check(g, sc, None)
    if base.takeover:
        raise OwnetError("takeover pre-exists")

    steps = int(math.floor(1.0 / quantum + 1e-9))
    grid = [i * quantum for i in range(1, steps + 1)]
    if grid[-1] < 1.0 - 1e-12:
        grid.append(1.0)
    grid[-1] = min(grid[-1], 1.0)

    def takeover_at(i: int) -> GpVerdict:
        return gp_check(g, sc, Transaction(buyer=buyer, target=target, share=grid[i]))

    top = takeover_at(len(grid) - 1)
    if not top.takeover:
        return LimitResult(max_share=1.0, binding_strategic=None)

    lo, hi = -1, len(grid) - 1  # invariant: no takeover at lo, takeover at hi
    verdict_hi = top
    while hi - lo > 1:
        mid = (lo + hi) // 2
        v = takeover_at(mid)
        if v.takeover:
            hi, verdict_hi = mid, v
        else:
            lo = mid
    max_share = grid[lo] if lo >= 0 else 0.0
    binding = min(w.strategic for w in verdict_hi.witnesses)
    return LimitResult(max_share=max_share, binding_strategic=binding)


def _quanta_ceil(amount: float, quantum: float) -> float:
    """Round ``amount`` up to the quantum grid (tolerant of float fuzz)."""
    k = math.ceil(amount / quantum - 1e-6)
    return max(k, 1) * quantum


def _required_delta(current: float, quantum: float) -> float:
    # smallest grid increment reaching strictly past the control threshold
    return _quanta_ceil((CONTROL_THRESHOLD + quantum) - current, quantum)


def _designated_holder(g: OwnershipGraph, public: Iterable[str], target: str) -> str:
    best_id, best_share = None, -1.0
    for p in sorted(public):
        share = controls(g, p).control_share.get(target, 0.0)
        if share > best_share + 1e-15:
            best_id, best_share = p, share
    return best_id  # public is non-empty, so always set


def _available_share(g: OwnershipGraph, closure: set[str], target: str) -> float:
    """Share of ``target`` that could still be bought by the public side:
    unallocated shares plus holdings outside the public closure."""
    incoming = g.in_items(target)
    total = math.fsum(w for _, w in incoming)
    outside = math.fsum(w for owner, w in incoming if owner not in closure)
    return max(0.0, 1.0 - total) + outside


def _apply_acquisition(
    g: OwnershipGraph, a: Acquisition, closure: set[str], foreign: frozenset[str]
) -> OwnershipGraph:
    """Execute a beef-up purchase with conservation: the delta comes first
    from unallocated shares, then buys out holders outside the public closure
    (foreign holders first, so entrenched stakes are dislodged)."""
    incoming = g.in_items(a.target)
    need = a.delta - max(0.0, 1.0 - math.fsum(w for _, w in incoming))
    updates: dict[tuple[str, str], float | None] = {}
    sellers = sorted(
        ((owner, w) for owner, w in incoming if owner not in closure and owner != a.holder),
        key=lambda ow: (ow[0] not in foreign, ow[0]),
    )
    for owner, held in sellers:
        if need <= 1e-12:
            break
        take = min(need, held)
        remaining = held - take
        updates[(owner, a.target)] = remaining if remaining > 1e-12 else None
        need -= take
    new_share = min(1.0, g.share_of(a.holder, a.target) + a.delta)
    updates[(a.holder, a.target)] = new_share
    return g.with_updated_edges(updates)


def apply_protection_plan(g: OwnershipGraph, sc: Scenario, plan: ProtectionPlan) -> OwnershipGraph:
    """Apply a plan's acquisitions with the same displacement semantics the
    planner assumed; the result satisfies the no-takeover guarantee."""
    working = g
    public = sorted(sc.public)
    for a in plan.acquisitions:
        jc = joint_controls(working, public)
        closure = set(public) | set(jc.controlled)
        working = _apply_acquisition(working, a, closure, sc.foreign)
    return working


def gp_protection(
    g: OwnershipGraph,
    sc: Scenario,
    with_intermediaries: bool = False,
    quantum: float = DEFAULT_PROTECTION_QUANTUM,
) -> ProtectionPlan:
    """Beef-up plan bringing every strategic company under public control so
    no set of foreign acquisitions can flip one.

    Strategic companies are handled in id order against a working graph that
    accumulates the chosen acquisitions. Candidates per company: a direct
    top-up by the best-placed public holder, and (optionally) taking control
    of one intermediary shareholder first. The chosen candidate minimises the
    total acquired share; ties favour the direct route.
    """
    if quantum <= 0:
        raise ConfigError("quantum must be positive")
    _check_scenario(g, sc)
    if not sc.public:
        raise ConfigError("protection requires a non-empty public set")

    working = _stage(g, sc)
    public = sorted(sc.public)
    chosen: list[Acquisition] = []
    options: dict[str, tuple[CandidatePlan, ...]] = {}
    residual_risk = False

    for s in sorted(sc.strategic):
        jc = joint_controls(working, public)
        closure = set(public) | set(jc.controlled)
        if s in jc.controlled:
            options[s] = ()
            continue

        candidates: list[CandidatePlan] = []
        cs_s = jc.control_share.get(s, 0.0)
        holder_s = _designated_holder(working, public, s)
        delta_s = _required_delta(cs_s, quantum)
        candidates.append(
            CandidatePlan((Acquisition(holder_s, s, round(delta_s, 12)),), round(delta_s, 12))
        )

        if with_intermediaries:
            for e, _w in sorted(working.in_items(s)):
                if e == s or e in closure or not working.entity(e).is_company:
                    continue
                delta_e = _required_delta(jc.control_share.get(e, 0.0), quantum)
                holder_e = _designated_holder(working, public, e)
                acq_e = Acquisition(holder_e, e, round(delta_e, 12))
                g2 = _apply_acquisition(working, acq_e, closure, sc.foreign)
                jc2 = joint_controls(g2, public)
                acqs = [acq_e]
                total = delta_e
                if s not in jc2.controlled:
                    top_up = _required_delta(jc2.control_share.get(s, 0.0), quantum)
                    acqs.append(Acquisition(_designated_holder(g2, public, s), s, round(top_up, 12)))
                    total += top_up
                candidates.append(CandidatePlan(tuple(acqs), round(total, 12), intermediary=e))

        candidates.sort(key=lambda c: (c.total, c.intermediary is not None, c.intermediary or ""))
        options[s] = tuple(candidates)
        best = candidates[0]

        for acq in best.acquisitions:
            jc_now = joint_controls(working, public)
            closure_now = set(public) | set(jc_now.controlled)
            avail = _available_share(working, closure_now, acq.target)
            delta = acq.delta
            if delta > avail + 1e-9:
                residual_risk = True
                steps = math.floor(avail / quantum + 1e-9)
                delta = round(steps * quantum, 12)
                if delta <= 0:
                    continue
                acq = Acquisition(acq.holder, acq.target, delta)
            working = _apply_acquisition(working, acq, closure_now, sc.foreign)
            chosen.append(acq)

    # self-verify: the plan must survive the strongest admissible adversary;
    # it cannot when the premise is already broken (e.g. a public company
    # whose own majority sits with the foreign set)
    final = joint_controls(working, public)
    if any(s not in final.controlled for s in sc.strategic):
        residual_risk = True
    elif sc.foreign:
        adversary = worst_case_adversary_graph(working, sc)
        if collusion_gp_check(adversary, sc.with_staged(()), None).takeover:
            residual_risk = True
    return ProtectionPlan(tuple(chosen), residual_risk, options)


def worst_case_adversary_graph(g: OwnershipGraph, sc: Scenario) -> OwnershipGraph:
    """Graph after the colluding foreign set buys, in every company, every
    share not held by the public closure. This is the strongest attack closed
    under the transaction rule; protection plans must survive it."""
    if not sc.foreign:
        raise ConfigError("adversary model needs a non-empty foreign set")
    public = sorted(sc.public) if sc.public else []
    closure: set[str] = set(public)
    if public:
        closure |= set(joint_controls(g, public).controlled)
    f0 = min(sc.foreign)

    updates: dict[tuple[str, str], float | None] = {}
    for i, y in enumerate(g.ids):
        # closure companies are out of reach: the public side holds or
        # controls their majority by definition, so their stock is not for sale
        if not g.is_company[i] or y in closure:
            continue
        held_by_closure = math.fsum(w for owner, w in g.in_items(y) if owner in closure)
        grab = max(0.0, 1.0 - held_by_closure)
        for owner, _w in g.in_items(y):
            if owner not in closure and owner != f0:
                updates[(owner, y)] = None
        if grab > 0:
            updates[(f0, y)] = grab
        elif g.share_of(f0, y) > 0:
            updates[(f0, y)] = None
    return g.with_updated_edges(updates)
