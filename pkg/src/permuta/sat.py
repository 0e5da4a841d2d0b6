"""Direct SAT encodings of permutation problems, unit propagation, a DP
solver, and a lockstep comparison of DP against forward checking.

Atom X_ij (primal x_i takes value j, equivalently dual d_j takes value i)
is numbered (i-1)*n + j.  Literals are signed atom numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .core import (
    AllDifferent, Block, Channel, Constraint, NotEquals, Problem, UnaryForbid,
    VarRef, satisfied, x,
)
from .search import Algorithm, Goal, Heuristic, SearchConfig, Solver

PRIMAL_SAT = "primal"
CHANNELLING_SAT = "channelling"

OK = "ok"
CONFLICT = "conflict"


def atom(i: int, j: int, n: int) -> int:
    return (i - 1) * n + j


def atom_pair(a: int, n: int) -> tuple[int, int]:
    return (a - 1) // n + 1, (a - 1) % n + 1


@dataclass
class ClauseSet:
    n: int
    variant: str
    clauses: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def num_atoms(self) -> int:
        return self.n * self.n

    def add(self, clause: Iterable[int]) -> None:
        lits = tuple(dict.fromkeys(clause))
        if any(-lit in lits for lit in lits):
            return  # tautology
        self.clauses.append(lits)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_atoms} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"

    def groups(self) -> list[tuple[int, ...]]:
        """At-least-one literal groups of the primal variables, in order."""
        n = self.n
        return [tuple(atom(i, j, n) for j in range(1, n + 1)) for i in range(1, n + 1)]


def encode_direct(n: int, variant: str = PRIMAL_SAT,
                  side_constraints: Sequence[Constraint | Sequence[int]] = ()) -> ClauseSet:
    """Direct encoding of a permutation of 1..n plus binary side constraints.

    Side constraints may be raw clauses or constraints over primal variables;
    constraints are encoded as one nogood clause per disallowed value pair
    (one unit clause per forbidden value for unary constraints).
    """
    if variant not in (PRIMAL_SAT, CHANNELLING_SAT):
        raise ValueError(f"unknown SAT variant {variant!r}")
    cs = ClauseSet(n, variant)
    rng = range(1, n + 1)
    for i in rng:
        cs.add(atom(i, j, n) for j in rng)
    for i in rng:
        for j, k in combinations(rng, 2):
            cs.add((-atom(i, j, n), -atom(i, k, n)))
    for j in rng:
        for i, k in combinations(rng, 2):
            cs.add((-atom(i, j, n), -atom(k, j, n)))
    if variant == CHANNELLING_SAT:
        for j in rng:
            cs.add(atom(i, j, n) for i in rng)
    for side in side_constraints:
        if isinstance(side, (list, tuple)):
            cs.add(side)
        else:
            for clause in _nogoods(side, n):
                cs.add(clause)
    return cs


def _nogoods(c: Constraint, n: int) -> list[tuple[int, ...]]:
    scope = c.scope
    if any(v.block != Block.PRIMAL for v in scope):
        raise ValueError(f"side constraint {c} is not over primal variables")
    rng = range(1, n + 1)
    if isinstance(c, UnaryForbid):
        return [(-atom(c.a.index, v, n),) for v in sorted(c.values) if 1 <= v <= n]
    if len(scope) != 2:
        raise ValueError(f"side constraint {c} is not binary")
    a, b = scope
    out = []
    for va in rng:
        for vb in rng:
            if not satisfied(c, {a: va, b: vb}):
                out.append((-atom(a.index, va, n), -atom(b.index, vb, n)))
    return out


# --------------------------------------------------------------------------
# unit propagation


class _Propagator:
    """Occurrence-list unit propagation over a fixed clause set."""

    def __init__(self, cs: ClauseSet):
        self.clauses = cs.clauses
        self.occ: dict[int, list[int]] = {}
        for k, clause in enumerate(self.clauses):
            for lit in clause:
                self.occ.setdefault(lit, []).append(k)

    def propagate(self, value: dict[int, bool], pending: list[int]) -> bool:
        """Extend ``value`` by unit propagation; ``pending`` literals were just
        set true.  Returns False on an empty clause."""
        clauses, occ = self.clauses, self.occ
        queue = list(pending)
        while queue:
            lit = queue.pop()
            # clauses containing the negation may have become unit or empty
            for k in occ.get(-lit, ()):
                unassigned = None
                count = 0
                sat = False
                for l2 in clauses[k]:
                    v = value.get(abs(l2))
                    if v is None:
                        count += 1
                        unassigned = l2
                        if count > 1:
                            break
                    elif v == (l2 > 0):
                        sat = True
                        break
                if sat or count > 1:
                    continue
                if count == 0:
                    return False
                value[abs(unassigned)] = unassigned > 0
                queue.append(unassigned)
        return True

    def initial(self, value: dict[int, bool]) -> bool:
        """Propagate existing units and the current assignment."""
        pending = [a if v else -a for a, v in value.items()]
        for clause in self.clauses:
            if not clause:
                return False
            free = [l for l in clause if abs(l) not in value]
            if any(value.get(abs(l)) == (l > 0) for l in clause):
                continue
            if not free:
                return False
            if len(free) == 1:
                lit = free[0]
                value[abs(lit)] = lit > 0
                pending.append(lit)
        return self.propagate(value, pending)


def unit_propagate(cs: ClauseSet, assignment: dict[int, bool] | None = None
                   ) -> tuple[dict[int, bool], str]:
    """Close ``assignment`` (atom -> bool) under unit resolution."""
    value = dict(assignment or {})
    ok = _Propagator(cs).initial(value)
    return value, OK if ok else CONFLICT


# --------------------------------------------------------------------------
# DP search


@dataclass
class DPResult:
    model: dict[int, bool] | None
    branches: int
    models: int
    fails: int
    decisions: list[tuple[int, int, int]] = field(default_factory=list)


def dp_solve(cs: ClauseSet, branch_order: Sequence[Sequence[int]] | None = None,
             all_solutions: bool = False) -> DPResult:
    """DP search splitting on at-least-one literal groups.

    ``branch_order`` lists the literal groups in variable order (default:
    the primal variables of ``cs``).  A node takes the first group with no
    true literal and tries each non-false literal in turn; only groups with
    two or more candidates count as branches, a single candidate being
    forced by unit propagation anyway.
    """
    groups = [tuple(g) for g in (branch_order if branch_order is not None else cs.groups())]
    prop = _Propagator(cs)
    value: dict[int, bool] = {}
    result = DPResult(None, 0, 0, 0)
    if not prop.initial(value):
        return result

    def rec(depth: int) -> bool:
        for gi, group in enumerate(groups):
            if any(value.get(a) is True for a in group):
                continue
            cands = [a for a in group if value.get(a) is not False]
            if not cands:
                return False
            counted = len(cands) > 1
            for a in cands:
                saved = dict(value)
                if counted:
                    result.branches += 1
                    result.decisions.append((depth, gi + 1, a))
                value[a] = True
                if prop.propagate(value, [a]):
                    if rec(depth + counted) and not all_solutions:
                        return True
                else:
                    result.fails += 1
                value.clear()
                value.update(saved)
            return False
        # every group satisfied
        result.models += 1
        if result.model is None:
            result.model = {a: value.get(a, False) for a in range(1, cs.num_atoms + 1)}
        return True

    rec(0)
    return result


def count_models(cs: ClauseSet) -> int:
    return dp_solve(cs, all_solutions=True).models


# --------------------------------------------------------------------------
# lockstep comparison


@dataclass
class LockstepReport:
    variant: str
    fc_branches: int
    dp_branches: int
    fc_solutions: int
    dp_models: int
    divergence: tuple[int, tuple | None, tuple | None] | None = None
    fc_decisions: list[tuple] = field(default_factory=list)
    dp_decisions: list[tuple] = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return (self.fc_branches == self.dp_branches
                and self.fc_solutions == self.dp_models and self.divergence is None)


def side_constraints(problem: Problem) -> list[Constraint]:
    """Constraints other than the permutation and channelling ones."""
    return [c for c in problem.constraints
            if not isinstance(c, (NotEquals, Channel, AllDifferent))]


def lockstep_compare(problem: Problem, variant: str) -> LockstepReport:
    """Run FC (fail-first on singletons) and DP with mirrored lex orders.

    ``problem`` must be a permutation of 1..n over its primal block; FC runs
    on the primal not-equals model for the primal SAT variant and on the
    channelling model otherwise.  Since one atom stands for both x_i = j and
    d_j = i, FC keeps each channelled pair of domains in sync.
    """
    from .core import (
        C, NEQ, build_permutation_model, dual_equivalent_domains, make_problem,
    )

    n = len(problem.primal)
    sides = side_constraints(problem)
    spec = NEQ if variant == PRIMAL_SAT else C
    base = build_permutation_model(n, spec)
    doms = base.domain_map
    primal_doms = {v: problem.domain(v) for v in problem.primal}
    doms.update(primal_doms)
    if base.dual:
        duals = dual_equivalent_domains([primal_doms[v] for v in problem.primal])
        doms.update(zip(base.dual, duals))
    csp = make_problem(n, n, doms, list(base.constraints) + sides, spec)
    forbids = []
    for v in problem.primal:
        missing = [j for j in range(1, n + 1) if j not in problem.domain(v)]
        if missing:
            forbids.append(UnaryForbid(v, frozenset(missing)))
    cs = encode_direct(n, variant, sides + forbids)

    config = SearchConfig(Algorithm.FC, Heuristic.LEX, Goal.ALL,
                          fail_first_singletons=True, branching="dway",
                          channel_views=True)
    solver = Solver(csp, config)
    solver.decisions = []
    sols, stats = solver.run()
    fc_dec = [(dep, v.index, atom(v.index, val, n)) for dep, v, val in solver.decisions]
    dp = dp_solve(cs, all_solutions=True)
    divergence = None
    for k, (a, b) in enumerate(zip(fc_dec, dp.decisions)):
        if a != b:
            divergence = (k, a, b)
            break
    else:
        if len(fc_dec) != len(dp.decisions):
            k = min(len(fc_dec), len(dp.decisions))
            divergence = (k, fc_dec[k] if k < len(fc_dec) else None,
                          dp.decisions[k] if k < len(dp.decisions) else None)
    return LockstepReport(variant, stats.nodes, dp.branches, stats.solutions, dp.models,
                          divergence, fc_dec, dp.decisions)
