"""Propagation entry points over a mutable domain store.

Each function narrows a :class:`DomainStore` in place and reports the
removed values, or the variable that wiped out.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from .core import (
    AllDifferent, Channel, ChannelImplies, Constraint, Domain, NotEquals,
    Problem, VarRef, make_problem, mask_values,
)
from .engine import Engine

FIXPOINT = "fixpoint"
WIPEOUT = "wipeout"


class DomainStore:
    """Mutable domains keyed by variable, with a revision counter each."""

    def __init__(self, domains: dict[VarRef, Domain] | Iterable[tuple[VarRef, Domain]]):
        items = domains.items() if isinstance(domains, dict) else domains
        self.masks: dict[VarRef, int] = {v: dom.mask for v, dom in items}
        self.revision: dict[VarRef, int] = {v: 0 for v in self.masks}

    @classmethod
    def from_problem(cls, problem: Problem) -> "DomainStore":
        return cls(problem.domains)

    def __getitem__(self, v: VarRef) -> Domain:
        return Domain.from_mask(self.masks[v])

    def __setitem__(self, v: VarRef, dom: Domain) -> None:
        self.narrow(v, dom.mask)

    def __contains__(self, v: VarRef) -> bool:
        return v in self.masks

    def __iter__(self):
        return iter(sorted(self.masks))

    def narrow(self, v: VarRef, mask: int) -> None:
        old = self.masks[v]
        if mask & ~old:
            raise ValueError(f"domain of {v} may only shrink")
        if mask != old:
            self.masks[v] = mask
            self.revision[v] += 1

    def copy(self) -> "DomainStore":
        out = DomainStore(())
        out.masks = dict(self.masks)
        out.revision = dict(self.revision)
        return out

    def as_dict(self) -> dict[VarRef, Domain]:
        return {v: Domain.from_mask(m) for v, m in sorted(self.masks.items())}

    def __eq__(self, other) -> bool:
        return isinstance(other, DomainStore) and self.masks == other.masks

    def __repr__(self) -> str:
        return "DomainStore(" + ", ".join(
            f"{v}={Domain.from_mask(m)!r}" for v, m in sorted(self.masks.items())) + ")"


@dataclass
class PropOutcome:
    status: str
    wiped: VarRef | None = None
    pruned: list[tuple[VarRef, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == FIXPOINT


def _run(store: DomainStore, constraints: Iterable[Constraint], alldiff: str = "gac",
         n: int = 0, m: int = 0, model=None) -> PropOutcome:
    problem = make_problem(n, m, store.as_dict(), constraints, model)
    return _run_problem(problem, store, alldiff)


def _run_problem(problem: Problem, store: DomainStore, alldiff: str) -> PropOutcome:
    domains = {v: store[v] if v in store else dom for v, dom in problem.domains}
    eng = Engine(problem, alldiff=alldiff, domains=domains)
    before = [domains[v].mask for v in eng.vars]
    eng.schedule_all()
    ok = eng.propagate() and all(eng.dom)
    pruned = []
    for k, v in enumerate(eng.vars):
        gone = before[k] & ~eng.dom[k]
        pruned.extend((v, val) for val in mask_values(gone))
        if v in store:
            store.narrow(v, eng.dom[k])
    if ok:
        return PropOutcome(FIXPOINT, None, pruned)
    emptied = [v for k, v in enumerate(eng.vars) if not eng.dom[k]]
    wiped = min(emptied) if emptied else eng.vars[eng.wiped]
    return PropOutcome(WIPEOUT, wiped, pruned)


def enforce_ac_neq(store: DomainStore, constraints: Iterable[NotEquals]) -> PropOutcome:
    """Singleton elimination over not-equals constraints to fixpoint."""
    cons = list(constraints)
    if any(not isinstance(c, NotEquals) for c in cons):
        raise TypeError("enforce_ac_neq takes NotEquals constraints only")
    return _run(store, cons)


def enforce_ac_channel(store: DomainStore,
                       channels: Iterable[Channel | ChannelImplies]) -> PropOutcome:
    """Arc-consistency on channelling constraints to fixpoint."""
    cons = list(channels)
    if any(not isinstance(c, (Channel, ChannelImplies)) for c in cons):
        raise TypeError("enforce_ac_channel takes channelling constraints only")
    return _run(store, cons)


def enforce_gac_alldiff(store: DomainStore, c: AllDifferent) -> PropOutcome:
    """Matching-based generalised arc-consistency on one all-different."""
    if not c.vars:
        raise ValueError("all-different needs at least one variable")
    return _run(store, [c])


def propagate_fixpoint(problem: Problem, store: DomainStore | None = None,
                       alldiff: str = "gac") -> PropOutcome:
    """Run every propagator of ``problem`` until no domain changes.

    ``store`` defaults to a fresh store on the problem's own domains and is
    narrowed in place.  ``alldiff="decompose"`` propagates all-different
    constraints as pairwise not-equals instead of matching-based GAC.
    """
    if store is None:
        store = DomainStore.from_problem(problem)
    return _run_problem(problem, store, alldiff)


def write_trace(outcome: PropOutcome, out: TextIO, cause: str = "fixpoint") -> None:
    """Emit one CSV row per removed value: varref, value, cause."""
    writer = csv.writer(out)
    writer.writerow(["varref", "value", "cause"])
    for v, val in outcome.pruned:
        writer.writerow([str(v), val, cause])
