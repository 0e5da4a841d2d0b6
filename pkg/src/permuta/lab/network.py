"""Extensional binary networks built from permutation and injection models."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from ..core import (
    AllDifferent, Constraint, Domain, ModelSpec, UnaryForbid, VarRef,
    build_injection_model, d, dual_equivalent_domains, mask_values,
    permutation_constraints, satisfied, x,
)


@dataclass
class BinaryNetwork:
    """Variables with domain bitmasks and explicit binary relations.

    ``rel[(p, q)][a]`` is the bitmask of values of variable ``q`` allowed
    with value ``a`` of variable ``p`` (positions into ``vars``).  A pair
    with no entry is the universal relation.  ``nonbinary`` holds the
    all-different scopes, consulted only by GAC and BC.
    """

    vars: list[VarRef]
    dom: list[int]
    rel: dict[tuple[int, int], dict[int, int]] = field(default_factory=dict)
    nonbinary: list[tuple[int, ...]] = field(default_factory=list)

    # -- construction ---------------------------------------------------

    @classmethod
    def from_constraints(cls, domains: dict[VarRef, Domain],
                         constraints: Iterable[Constraint],
                         universe: dict[VarRef, Domain] | None = None) -> "BinaryNetwork":
        """Tabulate binary constraints over ``universe`` (default: the domains)."""
        variables = sorted(domains)
        index = {v: k for k, v in enumerate(variables)}
        dom = [domains[v].mask for v in variables]
        uni = [(universe or domains)[v].mask for v in variables]
        net = cls(variables, dom)
        for c in constraints:
            scope = c.scope
            if isinstance(c, AllDifferent):
                net.nonbinary.append(tuple(index[v] for v in scope))
            elif isinstance(c, UnaryForbid):
                k = index[c.a]
                for val in c.values:
                    net.dom[k] &= ~(1 << val)
            elif len(scope) == 2:
                p, q = index[scope[0]], index[scope[1]]
                table: dict[int, int] = {}
                for a in mask_values(uni[p]):
                    bits = 0
                    for b in mask_values(uni[q]):
                        if satisfied(c, {scope[0]: a, scope[1]: b}):
                            bits |= 1 << b
                    table[a] = bits
                net.restrict(p, q, table)
            else:
                raise ValueError(f"{c} is neither binary nor all-different")
        return net

    def restrict(self, p: int, q: int, table: dict[int, int]) -> None:
        """Intersect relation (p, q) with ``table`` and keep it symmetric."""
        cur = self.rel.get((p, q))
        if cur is not None:
            table = {a: cur.get(a, 0) & table.get(a, 0) for a in set(cur) | set(table)}
        self.rel[(p, q)] = table
        back: dict[int, int] = {}
        for a, bits in table.items():
            for b in mask_values(bits):
                back[b] = back.get(b, 0) | 1 << a
        self.rel[(q, p)] = back

    def with_domains(self, dom: Sequence[int]) -> "BinaryNetwork":
        """Same relations, new domains (relations are shared, not copied)."""
        return BinaryNetwork(self.vars, list(dom), self.rel, self.nonbinary)

    def copy(self) -> "BinaryNetwork":
        return BinaryNetwork(list(self.vars), list(self.dom),
                             {k: dict(t) for k, t in self.rel.items()}, list(self.nonbinary))

    # -- queries --------------------------------------------------------

    def index(self, v: VarRef) -> int:
        return self.vars.index(v)

    def domain(self, v: VarRef) -> Domain:
        return Domain.from_mask(self.dom[self.index(v)])

    def domains(self) -> dict[VarRef, Domain]:
        return {v: Domain.from_mask(m) for v, m in zip(self.vars, self.dom)}

    def supports(self, p: int, a: int, q: int) -> int:
        """Values of ``q`` in its domain compatible with ``p = a``."""
        table = self.rel.get((p, q))
        if table is None:
            return self.dom[q]
        return table.get(a, 0) & self.dom[q]

    def allowed(self, p: int, a: int, q: int, b: int) -> bool:
        table = self.rel.get((p, q))
        return table is None or bool(table.get(a, 0) >> b & 1)

    def relation(self, u: VarRef, v: VarRef) -> set[tuple[int, int]]:
        """Allowed pairs of (u, v) within the current domains."""
        p, q = self.index(u), self.index(v)
        return {(a, b) for a in mask_values(self.dom[p])
                for b in mask_values(self.supports(p, a, q))}

    def is_symmetric(self) -> bool:
        for (p, q), table in self.rel.items():
            back = self.rel.get((q, p), {})
            for a, bits in table.items():
                for b in mask_values(bits):
                    if not back.get(b, 0) >> a & 1:
                        return False
        return True

    def nonempty(self) -> bool:
        return all(self.dom)

    def __len__(self) -> int:
        return len(self.vars)


# --------------------------------------------------------------------------
# model builders


def default_values(primal_domains: Sequence[Domain]) -> list[int]:
    """Value set of a permutation: the union of the domains if it has n
    values, otherwise 1..n."""
    n = len(primal_domains)
    union = 0
    for dom in primal_domains:
        union |= dom.mask
    vals = list(mask_values(union))
    if len(vals) == n:
        return vals
    if all(1 <= v <= n for v in vals):
        return list(range(1, n + 1))
    raise ValueError("cannot infer the permutation's value set")


@lru_cache(maxsize=64)
def _permutation_template(spec: ModelSpec, values: tuple[int, ...],
                          extra: tuple[Constraint, ...]) -> BinaryNetwork:
    n = len(values)
    primal = [x(i) for i in range(1, n + 1)]
    duals = [d(k) for k in range(1, n + 1)] if spec.has_dual else None
    full = Domain(values)
    universe = {v: full for v in primal}
    if duals:
        positions = Domain.range(1, n)
        universe.update({v: positions for v in duals})
    cons = permutation_constraints(primal, values, duals, spec) + list(extra)
    return BinaryNetwork.from_constraints(universe, cons)


def permutation_network(spec: ModelSpec, primal_domains: Sequence[Domain],
                        values: Sequence[int] | None = None,
                        extra: Sequence[Constraint] = ()) -> BinaryNetwork:
    """Network of ``spec`` on one permutation, dual domains equivalent to
    the primal ones.  ``extra`` constraints are over primal variables."""
    if values is None:
        values = default_values(primal_domains)
    template = _permutation_template(spec, tuple(values), tuple(extra))
    dom = [p.mask for p in primal_domains]
    if spec.has_dual:
        dom += [q.mask for q in dual_equivalent_domains(list(primal_domains), values)]
    net = template.with_domains(dom)
    for c in extra:
        if isinstance(c, UnaryForbid):
            k = net.index(c.a)
            for val in c.values:
                net.dom[k] &= ~(1 << val)
    return net


def permutation_configs_masks(net: BinaryNetwork, primal_masks: Sequence[int],
                              values: Sequence[int]) -> list[int]:
    """Domain vector for ``net`` given primal masks (duals mapped through
    the channelling bijection)."""
    n = len(primal_masks)
    dom = list(primal_masks)
    if len(net.vars) > n:
        for val in values:
            bits = 0
            for i, m in enumerate(primal_masks, start=1):
                if m >> val & 1:
                    bits |= 1 << i
            dom.append(bits)
    return dom


def injection_network(spec: ModelSpec, n: int, m: int,
                      primal_domains: Sequence[Domain],
                      dual_domains: Sequence[Domain] | None = None,
                      extra: Sequence[Constraint] = ()) -> BinaryNetwork:
    """Network of an injection model with explicit domains.

    Dual domains default to the model's full dual domains.
    """
    problem = build_injection_model(n, m, spec)
    universe = problem.domain_map
    net = BinaryNetwork.from_constraints(universe, list(problem.constraints) + list(extra))
    for i, dom in enumerate(primal_domains, start=1):
        net.dom[net.index(x(i))] = dom.mask & universe[x(i)].mask
    if spec.has_dual:
        for j in range(1, m + 1):
            k = net.index(d(j))
            if dual_domains is not None:
                net.dom[k] = dual_domains[j - 1].mask
            else:
                net.dom[k] = universe[d(j)].mask
    return net


def network_from_problem(problem, extra: Sequence[Constraint] = ()) -> BinaryNetwork:
    return BinaryNetwork.from_constraints(problem.domain_map,
                                          list(problem.constraints) + list(extra))

