"""Company control: monotone fixed point over the >50% rule.

A controller's closure starts from the seed (one entity, or a coalition
treated as mutually controlling) and repeatedly absorbs every company in
which the closure's members jointly hold strictly more than half the shares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .model import OwnershipGraph

CONTROL_THRESHOLD = 0.5


@dataclass(frozen=True)
class ControlResult:
    """Outcome of a control query.

    ``controlled`` excludes the seed itself (self-control is only the
    internal bootstrap); ``control_share`` maps every company receiving any
    share from the final closure to the closure's total holding in it.
    """

    controller: str | tuple[str, ...]
    controlled: frozenset[str]
    control_share: dict[str, float]

    def to_dict(self) -> dict:
        controller = list(self.controller) if isinstance(self.controller, tuple) else self.controller
        return {
            "controller": controller,
            "controlled": sorted(self.controlled),
            "control_share": {k: self.control_share[k] for k in sorted(self.control_share)},
        }


def _control_closure(g: OwnershipGraph, seed: list[str]) -> tuple[set[str], dict[str, float]]:
    members = set(seed)
    inflow: dict[str, float] = {}
    queue = sorted(members)
    qi = 0
    while qi < len(queue):
        y = queue[qi]
        qi += 1
        for z, w in g.out_items(y):
            inflow[z] = inflow.get(z, 0.0) + w
            if z not in members and inflow[z] > CONTROL_THRESHOLD:
                members.add(z)
                queue.append(z)
    # recompute shares over the final closure in sorted-member order so the
    # reported floats do not depend on discovery order
    shares: dict[str, float] = {}
    for z in inflow:
        held = [w for owner, w in g.in_items(z) if owner in members]
        if held:
            shares[z] = math.fsum(held)
    return members, shares


def controls(g: OwnershipGraph, x: str) -> ControlResult:
    """Companies ``x`` controls, directly or through controlled companies."""
    g.index_of(x)
    members, shares = _control_closure(g, [x])
    return ControlResult(controller=x, controlled=frozenset(members - {x}), control_share=shares)


def joint_controls(g: OwnershipGraph, coalition: Iterable[str]) -> ControlResult:
    """Control closure of a coalition whose members act as one block."""
    seed = sorted(set(coalition))
    if not seed:
        raise ValueError("coalition must be non-empty")
    for eid in seed:
        g.index_of(eid)
    members, shares = _control_closure(g, seed)
    return ControlResult(
        controller=tuple(seed),
        controlled=frozenset(members - set(seed)),
        control_share=shares,
    )
