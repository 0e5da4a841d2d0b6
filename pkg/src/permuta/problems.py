"""Benchmark builders: Langford, Golomb rulers, quasigroups, sport
scheduling and magic squares, each in any model variant.

Instances are addressable by strings such as ``langford:3,9`` or
``golomb:10,55``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

from .core import (
    ALLDIFF, AllDifferent, AtMostCount, BinaryTable, Block, ChannelImplies,
    Constraint, Domain, DualSepLink, Less, ModelSpec, Offset, Problem, Sum,
    UnaryForbid, VarRef, aux, build_injection_model, build_permutation_model,
    d, make_problem, permutation_constraints, x,
)

# --------------------------------------------------------------------------
# Langford


def langford_value(k: int, m: int) -> tuple[int, int]:
    """(digit, occurrence) encoded by primal index or dual value ``k``."""
    return (k - 1) % m + 1, (k - 1) // m + 1


def langford_index(digit: int, occurrence: int, m: int) -> int:
    return (occurrence - 1) * m + digit


def langford(n: int, m: int, model: ModelSpec, symmetry: bool = True,
             separation: str = "primal") -> Problem:
    """Langford's problem L(n, m): n copies of digits 1..m.

    ``separation`` places the separation constraints on the primal
    variables, the dual variables, or both.  With ``symmetry`` on, the
    middle occurrence of the largest digit is kept in the first half of the
    sequence and, when it sits exactly in the centre, digit m-1 is kept on
    the left of the centre.
    """
    if n not in (2, 3):
        raise ValueError(f"Langford builder supports n in (2, 3), got {n}")
    if m < 2:
        raise ValueError("need at least two digits")
    if separation not in ("primal", "dual", "both"):
        raise ValueError(f"unknown separation placement {separation!r}")
    size = n * m
    base = build_permutation_model(size, model)
    if separation != "primal" and not model.has_dual:
        raise ValueError(f"model {model} has no dual block for dual separation")
    cons: list[Constraint] = list(base.constraints)
    if separation in ("primal", "both"):
        for digit in range(1, m + 1):
            for occ in range(1, n):
                a = x(langford_index(digit, occ, m))
                b = x(langford_index(digit, occ + 1, m))
                cons.append(Offset(a, b, digit + 1))
    if separation in ("dual", "both"):
        cons.extend(_dual_separation(n, m))
    if symmetry:
        cons.extend(_langford_symmetry(n, m))
    return make_problem(size, size, base.domain_map, cons, model)


def _dual_separation(n: int, m: int) -> list[Constraint]:
    size = n * m
    out: list[Constraint] = []
    for digit in range(1, m + 1):
        gap = digit + 1
        span = (n - 1) * gap
        first = langford_index(digit, 1, m)
        for occ in range(1, n + 1):
            value = langford_index(digit, occ, m)
            before = (occ - 1) * gap
            after = span - before
            # positions where this occurrence cannot sit
            bad = [j for j in range(1, size + 1) if j - before < 1 or j + after > size]
            for j in bad:
                out.append(UnaryForbid(d(j), frozenset({value})))
        for j in range(1, size - span + 1):
            for occ in range(2, n + 1):
                out.append(DualSepLink(d(j), first, d(j + (occ - 1) * gap),
                                       langford_index(digit, occ, m)))
    return out


def _langford_symmetry(n: int, m: int) -> list[Constraint]:
    size = n * m
    twice_centre = size + 1
    values = range(1, size + 1)
    if n == 3:
        # the middle occurrence is the chain centre
        top = x(langford_index(m, 2, m))
        nxt = x(langford_index(m - 1, 2, m))
        limit = twice_centre // 2
        out: list[Constraint] = [UnaryForbid(top, frozenset(range(limit + 1, size + 1)))]
        if twice_centre % 2 == 0:
            centre = twice_centre // 2
            allowed = frozenset((a, b) for a in values for b in values
                                if a != centre or b < centre)
            out.append(BinaryTable(top, nxt, allowed))
        return out
    # n == 2: twice the chain centre is 2 * x + (digit + 1)
    top = x(langford_index(m, 1, m))
    nxt = x(langford_index(m - 1, 1, m))
    limit = (twice_centre - (m + 1)) // 2
    out = [UnaryForbid(top, frozenset(range(limit + 1, size + 1)))]
    if (twice_centre - (m + 1)) % 2 == 0:
        allowed = frozenset((a, b) for a in values for b in values
                            if 2 * a + m + 1 != twice_centre or 2 * b + m < twice_centre)
        out.append(BinaryTable(top, nxt, allowed))
    return out


def langford_sequence(solution: dict[VarRef, int], n: int, m: int) -> str:
    """Render a primal solution as its digit sequence."""
    seq = [0] * (n * m)
    for v, pos in solution.items():
        if v.block == Block.PRIMAL:
            seq[pos - 1] = langford_value(v.index, m)[0]
    return "".join(str(digit) for digit in seq)


# --------------------------------------------------------------------------
# Golomb rulers


def golomb_pairs(n: int) -> list[tuple[int, int]]:
    """Mark pairs (i, j), i < j, in primal-variable order."""
    return list(combinations(range(1, n + 1), 2))


def golomb(n: int, m: int, model: ModelSpec) -> Problem:
    """Golomb ruler with ``n`` marks and length ``m``.

    Primal variable k is the distance between the marks of the k-th pair
    of :func:`golomb_pairs`; the distances from mark 1 double as the mark
    positions.  An injection tag maps distances into 1..m directly; a
    permutation tag pads the distances with extra variables so that they
    form a permutation of 1..m.
    """
    if n < 3:
        raise ValueError("a ruler needs at least three marks")
    pairs = golomb_pairs(n)
    nd = len(pairs)
    if m < nd:
        raise ValueError(f"length {m} < {nd} distances")
    idx = {p: k for k, p in enumerate(pairs, start=1)}
    if model.injection:
        base = build_injection_model(nd, m, model)
    else:
        base = build_permutation_model(m, model)
    doms = base.domain_map
    doms[x(idx[(1, n)])] = Domain({m})
    cons: list[Constraint] = list(base.constraints)
    for i, j in pairs:
        if i > 1:
            cons.append(Sum((x(idx[(1, i)]), x(idx[(i, j)]), x(idx[(1, j)])), 0, (1, 1, -1)))
    if not model.injection:
        # padding variables are interchangeable; keep them increasing
        for k in range(nd + 1, m):
            cons.append(Less(x(k), x(k + 1)))
    return make_problem(base.n, m, doms, cons, model, base.dummies)


def golomb_marks(solution: dict[VarRef, int], n: int) -> list[int]:
    idx = {p: k for k, p in enumerate(golomb_pairs(n), start=1)}
    return [0] + [solution[x(idx[(1, j)])] for j in range(2, n + 1)]


def is_golomb_ruler(marks: list[int]) -> bool:
    dists = [b - a for a, b in combinations(sorted(marks), 2)]
    return len(set(dists)) == len(dists) and min(dists, default=1) > 0


# --------------------------------------------------------------------------
# Quasigroups


def qg_cell(a: int, b: int, m: int) -> VarRef:
    return x((a - 1) * m + b)


def quasigroup(kind: str, m: int, model: ModelSpec) -> Problem:
    """Idempotent order-``m`` quasigroup with the QG3 or QG4 identity.

    Each row and each column is a permutation with its own dual block.  The
    identity is grounded through one auxiliary pair variable per off-diagonal
    (a, b), whose value encodes the two intermediate products.
    """
    if kind not in ("qg3", "qg4"):
        raise ValueError(f"unknown quasigroup kind {kind!r}")
    if not 2 <= m <= 9:
        raise ValueError(f"quasigroup order {m} outside 2..9")
    if model.injection:
        raise ValueError("quasigroups use permutation models")
    full = Domain.range(1, m)
    doms: dict[VarRef, Domain] = {}
    for a in range(1, m + 1):
        for b in range(1, m + 1):
            doms[qg_cell(a, b, m)] = Domain({a}) if a == b else full
    cons: list[Constraint] = []
    values = list(range(1, m + 1))
    for r in range(1, m + 1):
        row = [qg_cell(r, b, m) for b in values]
        col = [qg_cell(a, r, m) for a in values]
        row_duals = col_duals = None
        if model.has_dual:
            row_duals = [d((r - 1) * m + v) for v in values]
            col_duals = [d(m * m + (r - 1) * m + v) for v in values]
            for v in row_duals + col_duals:
                doms[v] = full
        cons.extend(permutation_constraints(row, values, row_duals, model))
        cons.extend(permutation_constraints(col, values, col_duals, model))
    codes = range(1, m * m + 1)
    first = frozenset((c, (c - 1) // m + 1) for c in codes)
    second = frozenset((c, (c - 1) % m + 1) for c in codes)
    k = 0
    for a in range(1, m + 1):
        for b in range(1, m + 1):
            if a == b:
                continue
            k += 1
            pair = aux(k)
            doms[pair] = Domain(codes)
            if kind == "qg3":
                left, right = qg_cell(a, b, m), qg_cell(b, a, m)
            else:
                left, right = qg_cell(b, a, m), qg_cell(a, b, m)
            cons.append(BinaryTable(pair, left, first))
            cons.append(BinaryTable(pair, right, second))
            for u in values:
                for v in values:
                    cons.append(ChannelImplies(pair, (u - 1) * m + v, qg_cell(u, v, m), a))
    return make_problem(m * m, m, doms, cons, model)


def quasigroup_table(solution: dict[VarRef, int], m: int) -> list[list[int]]:
    return [[solution[qg_cell(a, b, m)] for b in range(1, m + 1)] for a in range(1, m + 1)]


# --------------------------------------------------------------------------
# Sport scheduling


def sport_games(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(1, n + 1), 2))


def sport(n: int, model: ModelSpec) -> Problem:
    """Round-robin sport scheduling for ``n`` teams.

    One primal variable per (week, period) slot holds the game played there.
    Even ``n``: n-1 weeks, n/2 periods, game ids 1..n(n-1)/2, a permutation.
    Odd ``n``: n weeks, (n-1)/2 periods, game id (h-1)*n + a for h < a over
    values 1..n*n, an injection.  Auxiliary home/away team variables carry
    the weekly all-different and the at-most-twice-per-period limits.
    """
    if not 3 <= n <= 12:
        raise ValueError(f"team count {n} outside 3..12")
    games = sport_games(n)
    if n % 2 == 0:
        weeks, periods = n - 1, n // 2
        if model.injection:
            raise ValueError("even team counts use permutation models")
        ids = {g: k for k, g in enumerate(games, start=1)}
        base = build_permutation_model(len(games), model)
    else:
        weeks, periods = n, (n - 1) // 2
        if not model.injection:
            raise ValueError("odd team counts use injection models")
        ids = {g: (g[0] - 1) * n + g[1] for g in games}
        base = build_injection_model(len(games), n * n, model)
    doms = base.domain_map
    valid = Domain(ids.values())
    for v in base.primal:
        doms[v] = valid
    cons: list[Constraint] = list(base.constraints)
    teams = Domain.range(1, n)
    home_of = frozenset((gid, g[0]) for g, gid in ids.items())
    away_of = frozenset((gid, g[1]) for g, gid in ids.items())

    def slot(w: int, p: int) -> int:
        return (w - 1) * periods + p

    for w in range(1, weeks + 1):
        week_teams = []
        for p in range(1, periods + 1):
            s = slot(w, p)
            home, away = aux(2 * s - 1), aux(2 * s)
            doms[home] = doms[away] = teams
            cons.append(BinaryTable(x(s), home, home_of))
            cons.append(BinaryTable(x(s), away, away_of))
            week_teams += [home, away]
        cons.append(AllDifferent(tuple(week_teams)))
    for p in range(1, periods + 1):
        scope = []
        for w in range(1, weeks + 1):
            s = slot(w, p)
            scope += [aux(2 * s - 1), aux(2 * s)]
        cons.append(AtMostCount(tuple(scope), 2))
    return make_problem(base.n, base.m, doms, cons, model, base.dummies)


# --------------------------------------------------------------------------
# Magic squares


def magic(n: int, model: ModelSpec) -> Problem:
    """Order-``n`` magic square over 1..n*n; cell (r, c) is x((r-1)*n + c)."""
    if not 1 <= n <= 6:
        raise ValueError(f"magic square order {n} outside 1..6")
    base = build_permutation_model(n * n, model)
    total = n * (n * n + 1) // 2
    cons: list[Constraint] = list(base.constraints)

    def cell(r: int, c: int) -> VarRef:
        return x((r - 1) * n + c)

    rng = range(1, n + 1)
    for r in rng:
        cons.append(Sum(tuple(cell(r, c) for c in rng), total))
    for c in rng:
        cons.append(Sum(tuple(cell(r, c) for r in rng), total))
    cons.append(Sum(tuple(cell(k, k) for k in rng), total))
    cons.append(Sum(tuple(cell(k, n + 1 - k) for k in rng), total))
    return make_problem(n * n, n * n, base.domain_map, cons, model)


def magic_total(n: int) -> int:
    return n * (n * n + 1) // 2


# --------------------------------------------------------------------------
# Random binary permutation problems


def random_permutation_csp(n: int, model: ModelSpec, seed: int, constraints: int = 5,
                           density: float = 0.6) -> Problem:
    """Permutation of 1..n plus ``constraints`` random binary tables on
    distinct primal pairs, each allowing a pair with probability ``density``."""
    rng = random.Random(seed)
    cons = []
    for _ in range(constraints):
        a, b = rng.sample(range(1, n + 1), 2)
        allowed = frozenset((u, v) for u in range(1, n + 1) for v in range(1, n + 1)
                            if rng.random() < density)
        cons.append(BinaryTable(x(a), x(b), allowed))
    return build_permutation_model(n, model).with_constraints(cons)


# --------------------------------------------------------------------------
# Instances


@dataclass(frozen=True)
class Instance:
    kind: str
    params: tuple[int, ...]
    model: ModelSpec = ALLDIFF

    def __str__(self) -> str:
        return f"{self.kind}:{','.join(map(str, self.params))}"

    def build(self, **options) -> Problem:
        kind, p = self.kind, self.params
        if kind == "langford":
            return langford(p[0], p[1], self.model, **options)
        if kind == "golomb":
            return golomb(p[0], p[1], self.model)
        return build_benchmark(kind, p[0], self.model)


_ARITY = {"langford": 2, "golomb": 2, "qg3": 1, "qg4": 1, "sport": 1, "magic": 1}


def parse_instance(text: str, model: ModelSpec = ALLDIFF) -> Instance:
    """Parse ``kind:a,b`` instance strings."""
    try:
        kind, _, rest = text.partition(":")
        kind = kind.strip().lower()
        params = tuple(int(t) for t in rest.split(",") if t.strip())
    except ValueError as exc:
        raise ValueError(f"bad instance string {text!r}") from exc
    if kind not in _ARITY:
        raise ValueError(f"unknown instance kind {kind!r}")
    if len(params) != _ARITY[kind]:
        raise ValueError(f"{kind} takes {_ARITY[kind]} parameter(s), got {text!r}")
    return Instance(kind, params, model)


def build_benchmark(kind: str, size: int, model: ModelSpec) -> Problem:
    kind = kind.lower()
    if kind in ("qg3", "qg4"):
        return quasigroup(kind, size, model)
    if kind == "sport":
        return sport(size, model)
    if kind == "magic":
        return magic(size, model)
    raise ValueError(f"unknown benchmark {kind!r}")
