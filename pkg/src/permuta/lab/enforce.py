"""Enforcement helpers for the lab: AC to fixpoint, strong path-consistency,
and brute-force GAC used as an oracle."""

from __future__ import annotations

from itertools import product
from typing import Callable, Sequence

from ..core import Domain, VarRef, mask_values
from .network import BinaryNetwork

ENUMERATION_LIMIT = 10 ** 7


class Inconsistent(Exception):
    """A domain or relation was emptied."""

    def __init__(self, message: str, network: BinaryNetwork | None = None):
        super().__init__(message)
        self.network = network


def enforce_ac(net: BinaryNetwork) -> bool:
    """AC-3 on the binary relations, narrowing ``net.dom`` in place.

    Returns False on a wipeout.
    """
    dom = net.dom
    arcs: dict[int, list[int]] = {}
    for p, q in net.rel:
        arcs.setdefault(q, []).append(p)
    queue = list(net.rel)
    queued = set(queue)
    while queue:
        p, q = queue.pop()
        queued.discard((p, q))
        table = net.rel[(p, q)]
        keep = 0
        dq = dom[q]
        for a in mask_values(dom[p]):
            if table.get(a, 0) & dq:
                keep |= 1 << a
        if keep != dom[p]:
            dom[p] = keep
            if not keep:
                return False
            for r in arcs.get(p, ()):
                if r != q and (r, p) not in queued:
                    queue.append((r, p))
                    queued.add((r, p))
    return True


def brute_force_gac(scope: Sequence[VarRef],
                    allowed: Callable[[dict[VarRef, int]], bool],
                    store: dict[VarRef, Domain]) -> dict[VarRef, Domain]:
    """Keep each value that occurs in some satisfying assignment of ``scope``.

    Variables outside ``scope`` are returned unchanged.
    """
    size = 1
    for v in scope:
        size *= len(store[v])
    if size > ENUMERATION_LIMIT:
        raise ValueError(f"{size} assignments exceed the enumeration limit")
    seen = [0] * len(scope)
    for combo in product(*(tuple(store[v]) for v in scope)):
        if allowed(dict(zip(scope, combo))):
            for k, val in enumerate(combo):
                seen[k] |= 1 << val
    out = dict(store)
    for k, v in enumerate(scope):
        out[v] = Domain.from_mask(seen[k])
    return out


def alldiff_supported(net: BinaryNetwork, scope: Sequence[int]) -> list[int]:
    """Per scope position, the values extending to an all-different tuple."""
    doms = [tuple(mask_values(net.dom[k])) for k in scope]
    size = 1
    for dom in doms:
        size *= len(dom)
    if size > ENUMERATION_LIMIT:
        raise ValueError(f"{size} assignments exceed the enumeration limit")
    seen = [0] * len(scope)
    full = [net.dom[k] for k in scope]

    def extend(pos: int, used: int, chosen: list[int]) -> None:
        if pos == len(scope):
            for k, val in enumerate(chosen):
                seen[k] |= 1 << val
            return
        for val in doms[pos]:
            if not used >> val & 1:
                chosen.append(val)
                extend(pos + 1, used | 1 << val, chosen)
                chosen.pop()
                if seen == full:
                    return

    extend(0, 0, [])
    return seen


def enforce_pc(net: BinaryNetwork) -> BinaryNetwork:
    """Strong path-consistency: PC interleaved with AC to a joint fixpoint.

    Every pair of variables gets an explicit relation in the result.  Raises
    :class:`Inconsistent` if a domain empties.
    """
    out = net.copy()
    nv = len(out.vars)
    if not out.nonempty():
        raise Inconsistent("empty domain", out)
    for p in range(nv):
        for q in range(nv):
            if p != q and (p, q) not in out.rel:
                out.rel[(p, q)] = {a: out.dom[q] for a in mask_values(out.dom[p])}
    # relations restricted to the current domains
    for (p, q), table in out.rel.items():
        out.rel[(p, q)] = {a: table.get(a, 0) & out.dom[q] for a in mask_values(out.dom[p])}
    changed = True
    while changed:
        changed = False
        if not enforce_ac(out):
            raise Inconsistent("domain wipeout", out)
        dom = out.dom
        for (p, q), table in out.rel.items():
            for a in list(table):
                if not dom[p] >> a & 1:
                    del table[a]
                    continue
                bits = table[a] & dom[q]
                if bits != table[a]:
                    table[a] = bits
        for p in range(nv):
            for q in range(p + 1, nv):
                rpq = out.rel[(p, q)]
                rqp = out.rel[(q, p)]
                for a in mask_values(dom[p]):
                    for b in mask_values(rpq.get(a, 0)):
                        for r in range(nv):
                            if r == p or r == q:
                                continue
                            if not (out.rel[(p, r)].get(a, 0) & out.rel[(q, r)].get(b, 0)
                                    & dom[r]):
                                rpq[a] &= ~(1 << b)
                                rqp[b] &= ~(1 << a)
                                changed = True
                                break
    return out
