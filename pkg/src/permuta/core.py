"""Variables, domains, constraints and model builders for permutation and
injection problems.

Values and indices are 1-based.  A problem has a primal block ``x``, an
optional dual block ``d`` and an optional auxiliary block ``a`` (used by
benchmark encodings that need helper variables).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple, Sequence


class Block(enum.IntEnum):
    PRIMAL = 0
    DUAL = 1
    AUX = 2

    @property
    def letter(self) -> str:
        return "xda"[self.value]


class VarRef(NamedTuple):
    block: Block
    index: int

    def __str__(self) -> str:
        return f"{self.block.letter}{self.index}"

    @classmethod
    def parse(cls, text: str) -> "VarRef":
        block = {"x": Block.PRIMAL, "d": Block.DUAL, "a": Block.AUX}[text[0]]
        return cls(block, int(text[1:]))


def x(i: int) -> VarRef:
    return VarRef(Block.PRIMAL, i)


def d(j: int) -> VarRef:
    return VarRef(Block.DUAL, j)


def aux(k: int) -> VarRef:
    return VarRef(Block.AUX, k)


class Domain:
    """Immutable sorted set of non-negative integers backed by a bitmask."""

    __slots__ = ("mask",)

    def __init__(self, values: Iterable[int] = ()):
        mask = 0
        for v in values:
            if v < 0:
                raise ValueError(f"negative domain value {v}")
            mask |= 1 << v
        self.mask = mask

    @classmethod
    def from_mask(cls, mask: int) -> "Domain":
        dom = cls.__new__(cls)
        dom.mask = mask
        return dom

    @classmethod
    def range(cls, lo: int, hi: int) -> "Domain":
        """Domain {lo..hi} inclusive."""
        if hi < lo:
            return cls()
        return cls.from_mask(((1 << (hi - lo + 1)) - 1) << lo)

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(mask_values(self.mask))

    def __iter__(self) -> Iterator[int]:
        return mask_values(self.mask)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __contains__(self, v: int) -> bool:
        return v >= 0 and bool(self.mask >> v & 1)

    def __eq__(self, other) -> bool:
        if isinstance(other, Domain):
            return self.mask == other.mask
        if isinstance(other, (set, frozenset)):
            return set(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.mask)

    def __bool__(self) -> bool:
        return self.mask != 0

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self)) + "}"

    @property
    def min(self) -> int:
        return (self.mask & -self.mask).bit_length() - 1

    @property
    def max(self) -> int:
        return self.mask.bit_length() - 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_values(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# --------------------------------------------------------------------------
# Constraints


@dataclass(frozen=True)
class NotEquals:
    a: VarRef
    b: VarRef
    # a value both sides may share (the shared c3 dummy)
    exempt: int | None = None

    @property
    def scope(self) -> tuple[VarRef, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class Channel:
    """``x = j`` iff ``d = i``."""

    x: VarRef
    j: int
    d: VarRef
    i: int

    @property
    def scope(self) -> tuple[VarRef, ...]:
        return (self.x, self.d)


@dataclass(frozen=True)
class ChannelImplies:
    """``x = j`` implies ``d = i`` (one-directional c1 channel)."""

    x: VarRef
    j: int
    d: VarRef
    i: int

    @property
    def scope(self) -> tuple[VarRef, ...]:
        return (self.x, self.d)


@dataclass(frozen=True)
class AllDifferent:
    vars: tuple[VarRef, ...]

    @property
    def scope(self) -> tuple[VarRef, ...]:
        return self.vars


@dataclass(frozen=True)
class Offset:
    """``b = a + k``."""

    a: VarRef
    b: VarRef
    k: int

    @property
    def scope(self) -> tuple[VarRef, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class Less:
    a: VarRef
    b: VarRef

    @property
    def scope(self) -> tuple[VarRef, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class DualSepLink:
    """``a = i`` iff ``b = i2`` (dual form of a separation constraint)."""

    a: VarRef
    i: int
    b: VarRef
    i2: int

    @property
    def scope(self) -> tuple[VarRef, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class Sum:
    """``sum(coeffs[k] * vars[k]) = total``."""

    vars: tuple[VarRef, ...]
    total: int
    coeffs: tuple[int, ...] | None = None

    @property
    def scope(self) -> tuple[VarRef, ...]:
        return self.vars

    @property
    def weights(self) -> tuple[int, ...]:
        return self.coeffs if self.coeffs is not None else (1,) * len(self.vars)


@dataclass(frozen=True)
class BinaryTable:
    a: VarRef
    b: VarRef
    allowed: frozenset[tuple[int, int]]

    @property
    def scope(self) -> tuple[VarRef, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class UnaryForbid:
    a: VarRef
    values: frozenset[int]

    @property
    def scope(self) -> tuple[VarRef, ...]:
        return (self.a,)


@dataclass(frozen=True)
class AtMostCount:
    """Every value occurs at most ``cap`` times among ``vars``."""

    vars: tuple[VarRef, ...]
    cap: int

    @property
    def scope(self) -> tuple[VarRef, ...]:
        return self.vars


Constraint = (
    NotEquals | Channel | ChannelImplies | AllDifferent | Offset | Less
    | DualSepLink | Sum | BinaryTable | UnaryForbid | AtMostCount
)


def satisfied(c: Constraint, value: dict[VarRef, int]) -> bool:
    """Check a constraint against a complete assignment of its scope."""
    if isinstance(c, NotEquals):
        va, vb = value[c.a], value[c.b]
        return va != vb or (c.exempt is not None and va == c.exempt)
    if isinstance(c, Channel):
        return (value[c.x] == c.j) == (value[c.d] == c.i)
    if isinstance(c, ChannelImplies):
        return value[c.x] != c.j or value[c.d] == c.i
    if isinstance(c, AllDifferent):
        vals = [value[v] for v in c.vars]
        return len(set(vals)) == len(vals)
    if isinstance(c, Offset):
        return value[c.b] == value[c.a] + c.k
    if isinstance(c, Less):
        return value[c.a] < value[c.b]
    if isinstance(c, DualSepLink):
        return (value[c.a] == c.i) == (value[c.b] == c.i2)
    if isinstance(c, Sum):
        return sum(w * value[v] for w, v in zip(c.weights, c.vars)) == c.total
    if isinstance(c, BinaryTable):
        return (value[c.a], value[c.b]) in c.allowed
    if isinstance(c, UnaryForbid):
        return value[c.a] not in c.values
    if isinstance(c, AtMostCount):
        counts: dict[int, int] = {}
        for v in c.vars:
            counts[value[v]] = counts.get(value[v], 0) + 1
        return max(counts.values(), default=0) <= c.cap
    raise TypeError(f"unknown constraint {c!r}")


# --------------------------------------------------------------------------
# Model tags


@dataclass(frozen=True)
class ModelSpec:
    """Which permutation (or injection) constraints a model posts.

    ``primal`` / ``dual`` are ``None``, ``"neq"`` or ``"alldiff"``; ``channel``
    is ``None``, ``"c"`` (bidirectional), or for injections ``"c1"``, ``"c2"``
    or ``"c3"``.
    """

    symbol: str
    primal: str | None
    channel: str | None
    dual: str | None
    injection: bool = False

    @property
    def has_dual(self) -> bool:
        return self.channel is not None or self.dual is not None

    @property
    def has_alldiff(self) -> bool:
        return self.primal == "alldiff" or self.dual == "alldiff"

    @property
    def cli_tag(self) -> str:
        return _CLI_TAGS[self]

    def __str__(self) -> str:
        return self.symbol


NEQ = ModelSpec("≠", "neq", None, None)
C = ModelSpec("c", None, "c", None)
ALLDIFF = ModelSpec("∀", "alldiff", None, None)
NEQ_C = ModelSpec("≠c", "neq", "c", None)
C_NEQ = ModelSpec("c≠", None, "c", "neq")
ALLDIFF_C = ModelSpec("∀c", "alldiff", "c", None)
C_ALLDIFF = ModelSpec("c∀", None, "c", "alldiff")
NEQ_C_NEQ = ModelSpec("≠c≠", "neq", "c", "neq")
ALLDIFF_C_NEQ = ModelSpec("∀c≠", "alldiff", "c", "neq")
NEQ_C_ALLDIFF = ModelSpec("≠c∀", "neq", "c", "alldiff")
ALLDIFF_C_ALLDIFF = ModelSpec("∀c∀", "alldiff", "c", "alldiff")

PERMUTATION_TAGS = (
    NEQ, C, ALLDIFF, NEQ_C, C_NEQ, ALLDIFF_C, C_ALLDIFF,
    NEQ_C_NEQ, ALLDIFF_C_NEQ, NEQ_C_ALLDIFF, ALLDIFF_C_ALLDIFF,
)

INJ_NEQ = ModelSpec("≠", "neq", None, None, injection=True)
INJ_ALLDIFF = ModelSpec("∀", "alldiff", None, None, injection=True)
C1 = ModelSpec("c1", None, "c1", None, injection=True)
C2 = ModelSpec("c2", None, "c2", None, injection=True)
C3 = ModelSpec("c3", None, "c3", None, injection=True)
C2_NEQ = ModelSpec("c2≠", None, "c2", "neq", injection=True)
ALLDIFF_C2 = ModelSpec("∀c2", "alldiff", "c2", None, injection=True)

INJECTION_TAGS = (INJ_NEQ, INJ_ALLDIFF, C1, C2, C3, C2_NEQ, ALLDIFF_C2)

_CLI_TAGS = {
    NEQ: "neq", C: "c", ALLDIFF: "all-diff", NEQ_C: "neq-c", C_NEQ: "c-neq",
    ALLDIFF_C: "alldiff-c", C_ALLDIFF: "c-alldiff", NEQ_C_NEQ: "neq-c-neq",
    ALLDIFF_C_NEQ: "alldiff-c-neq", NEQ_C_ALLDIFF: "neq-c-alldiff",
    ALLDIFF_C_ALLDIFF: "alldiff-c-alldiff",
    INJ_NEQ: "injection-neq", INJ_ALLDIFF: "injection-alldiff",
    C1: "injection-c1", C2: "injection-c2", C3: "injection-c3",
    C2_NEQ: "injection-c2neq", ALLDIFF_C2: "injection-alldiff-c2",
}


def parse_model(text: str) -> ModelSpec:
    """Look up a model by CLI tag or symbol (permutation symbols win)."""
    for spec, tag in _CLI_TAGS.items():
        if text == tag:
            return spec
    for spec in PERMUTATION_TAGS + INJECTION_TAGS:
        if text == spec.symbol:
            return spec
    raise ValueError(f"unknown model tag {text!r}")


def injection_counterpart(spec: ModelSpec) -> ModelSpec:
    """Permutation tag whose constraints coincide with ``spec`` when m = n."""
    table = {
        INJ_NEQ: NEQ, INJ_ALLDIFF: ALLDIFF, C1: C, C2: C, C3: C,
        C2_NEQ: C_NEQ, ALLDIFF_C2: ALLDIFF_C,
    }
    return table[spec]


# --------------------------------------------------------------------------
# Problems


@dataclass(frozen=True)
class Problem:
    """A CSP over primal, dual and auxiliary variables.

    ``domains`` is ordered by variable (block, then index).
    """

    n: int
    m: int
    domains: tuple[tuple[VarRef, Domain], ...]
    constraints: tuple[Constraint, ...]
    model: ModelSpec | None = None
    # dual values n+1..m (c2) or n+1 (c3) that carry no channel
    dummies: frozenset[int] = field(default_factory=frozenset)

    @property
    def variables(self) -> tuple[VarRef, ...]:
        return tuple(v for v, _ in self.domains)

    def domain(self, v: VarRef) -> Domain:
        return self.domain_map[v]

    @property
    def domain_map(self) -> dict[VarRef, Domain]:
        return dict(self.domains)

    def block(self, block: Block) -> tuple[VarRef, ...]:
        return tuple(v for v, _ in self.domains if v.block == block)

    @property
    def primal(self) -> tuple[VarRef, ...]:
        return self.block(Block.PRIMAL)

    @property
    def dual(self) -> tuple[VarRef, ...]:
        return self.block(Block.DUAL)

    def with_domains(self, updates: dict[VarRef, Domain]) -> "Problem":
        doms = tuple((v, updates.get(v, dom)) for v, dom in self.domains)
        return Problem(self.n, self.m, doms, self.constraints, self.model, self.dummies)

    def with_constraints(self, extra: Sequence[Constraint]) -> "Problem":
        return Problem(self.n, self.m, self.domains,
                       self.constraints + tuple(extra), self.model, self.dummies)

    def is_solution(self, assignment: dict[VarRef, int]) -> bool:
        doms = self.domain_map
        if any(assignment[v] not in doms[v] for v in doms):
            return False
        return all(satisfied(c, assignment) for c in self.constraints)


def make_problem(n: int, m: int, domains: dict[VarRef, Domain],
                 constraints: Iterable[Constraint], model: ModelSpec | None = None,
                 dummies: Iterable[int] = ()) -> Problem:
    doms = tuple(sorted(domains.items()))
    known = {v for v, _ in doms}
    cons = tuple(constraints)
    for c in cons:
        for v in c.scope:
            if v not in known:
                raise ValueError(f"constraint {c} refers to unknown variable {v}")
    return Problem(n, m, doms, cons, model, frozenset(dummies))


def permutation_constraints(
    scope: Sequence[VarRef],
    values: Sequence[int],
    duals: Sequence[VarRef] | None,
    spec: ModelSpec,
) -> list[Constraint]:
    """Constraints ``spec`` posts on one permutation.

    ``scope[p]`` is the primal variable at position p+1; ``duals[k]`` is the
    dual variable of ``values[k]`` whose value is a 1-based position in
    ``scope``.
    """
    out: list[Constraint] = []
    if spec.primal == "neq":
        out.extend(NotEquals(a, b) for a, b in combinations(scope, 2))
    elif spec.primal == "alldiff":
        out.append(AllDifferent(tuple(scope)))
    if spec.channel is not None:
        assert duals is not None
        for p, xv in enumerate(scope, start=1):
            for dv, val in zip(duals, values):
                out.append(Channel(xv, val, dv, p))
    if spec.dual == "neq":
        out.extend(NotEquals(a, b) for a, b in combinations(duals, 2))
    elif spec.dual == "alldiff":
        out.append(AllDifferent(tuple(duals)))
    return out


def build_permutation_model(n: int, spec: ModelSpec) -> Problem:
    if n < 1:
        raise ValueError("n must be positive")
    if spec.injection or spec not in PERMUTATION_TAGS:
        raise ValueError(f"{spec} is not a permutation tag")
    full = Domain.range(1, n)
    primal = [x(i) for i in range(1, n + 1)]
    domains = {v: full for v in primal}
    duals = None
    if spec.has_dual:
        duals = [d(j) for j in range(1, n + 1)]
        domains.update({v: full for v in duals})
    cons = permutation_constraints(primal, range(1, n + 1), duals, spec)
    return make_problem(n, n, domains, cons, spec)


DUMMY_OFFSET = 1  # c3 dummy is n + 1


def build_injection_model(n: int, m: int, spec: ModelSpec) -> Problem:
    """Injection of n primal variables into values 1..m."""
    if n < 1:
        raise ValueError("n must be positive")
    if m < n:
        raise ValueError(f"m={m} < n={n}: no injection exists")
    if not spec.injection:
        raise ValueError(f"{spec} is not an injection tag")
    primal = [x(i) for i in range(1, n + 1)]
    domains: dict[VarRef, Domain] = {v: Domain.range(1, m) for v in primal}
    duals = [d(j) for j in range(1, m + 1)]
    cons: list[Constraint] = []
    dummies: set[int] = set()
    if spec.primal == "neq":
        cons.extend(NotEquals(a, b) for a, b in combinations(primal, 2))
    elif spec.primal == "alldiff":
        cons.append(AllDifferent(tuple(primal)))
    if spec.channel == "c1":
        domains.update({v: Domain.range(1, n) for v in duals})
        for i in range(1, n + 1):
            for j in range(1, m + 1):
                cons.append(ChannelImplies(x(i), j, d(j), i))
    elif spec.channel in ("c2", "c3"):
        if spec.channel == "c2":
            dummies = set(range(n + 1, m + 1))
            dual_dom = Domain.range(1, m)
        else:
            dummies = {n + DUMMY_OFFSET} if m > n else set()
            dual_dom = Domain.range(1, n + 1) if m > n else Domain.range(1, n)
        domains.update({v: dual_dom for v in duals})
        for i in range(1, n + 1):
            for j in range(1, m + 1):
                cons.append(Channel(x(i), j, d(j), i))
    if spec.dual == "neq":
        exempt = None
        if spec.channel == "c3" and dummies:
            exempt = n + DUMMY_OFFSET
        cons.extend(NotEquals(a, b, exempt) for a, b in combinations(duals, 2))
    if spec.channel is None and spec.dual is None:
        domains = {v: dom for v, dom in domains.items() if v.block == Block.PRIMAL}
    return make_problem(n, m, domains, cons, spec, dummies)


def dual_equivalent_domains(primal_domains: Sequence[Domain] | dict[int, Domain],
                            values: Sequence[int] | None = None) -> list[Domain]:
    """Dual domains under the channelling bijection.

    ``primal_domains[i-1]`` is dom(x_i); the result's k-th entry is the domain
    of the dual variable for ``values[k]`` (default 1..n) and holds the
    indices i with that value in dom(x_i).
    """
    if isinstance(primal_domains, dict):
        primal_domains = [primal_domains[i] for i in sorted(primal_domains)]
    n = len(primal_domains)
    if values is None:
        values = range(1, n + 1)
    out = []
    for j in values:
        out.append(Domain(i for i, dom in enumerate(primal_domains, start=1) if j in dom))
    return out
