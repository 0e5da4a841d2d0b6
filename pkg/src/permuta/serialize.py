"""Line-oriented text format for problems.

    vars <n> <m>
    model <tag>            optional
    dummies <v> ...        optional
    dom <var> <v> ...      one per variable
    ctr <kind> <args>      one per constraint

Dumping then loading gives back an equal problem, and loading then dumping
gives back the same text.
"""

from __future__ import annotations

from .core import (
    AllDifferent, AtMostCount, BinaryTable, Channel, ChannelImplies, Constraint,
    Domain, DualSepLink, Less, NotEquals, Offset, Problem, Sum, UnaryForbid,
    VarRef, make_problem, parse_model,
)


def _v(ref: VarRef) -> str:
    return str(ref)


def dump_constraint(c: Constraint) -> str:
    if isinstance(c, NotEquals):
        tail = "" if c.exempt is None else f" {c.exempt}"
        return f"neq {c.a} {c.b}{tail}"
    if isinstance(c, Channel):
        return f"channel {c.x} {c.j} {c.d} {c.i}"
    if isinstance(c, ChannelImplies):
        return f"implies {c.x} {c.j} {c.d} {c.i}"
    if isinstance(c, AllDifferent):
        return "alldiff " + " ".join(map(_v, c.vars))
    if isinstance(c, Offset):
        return f"offset {c.a} {c.b} {c.k}"
    if isinstance(c, Less):
        return f"less {c.a} {c.b}"
    if isinstance(c, DualSepLink):
        return f"seplink {c.a} {c.i} {c.b} {c.i2}"
    if isinstance(c, Sum):
        if c.coeffs is None:
            return f"sum {c.total} " + " ".join(map(_v, c.vars))
        terms = " ".join(f"{v}:{w}" for v, w in zip(c.vars, c.coeffs))
        return f"wsum {c.total} {terms}"
    if isinstance(c, BinaryTable):
        pairs = " ".join(f"{u},{w}" for u, w in sorted(c.allowed))
        return f"table {c.a} {c.b} {pairs}".rstrip()
    if isinstance(c, UnaryForbid):
        return f"forbid {c.a} " + " ".join(map(str, sorted(c.values)))
    if isinstance(c, AtMostCount):
        return f"atmost {c.cap} " + " ".join(map(_v, c.vars))
    raise TypeError(f"cannot serialise {c!r}")


def parse_constraint(text: str) -> Constraint:
    kind, *args = text.split()
    ref = VarRef.parse
    try:
        if kind == "neq":
            exempt = int(args[2]) if len(args) > 2 else None
            return NotEquals(ref(args[0]), ref(args[1]), exempt)
        if kind == "channel":
            return Channel(ref(args[0]), int(args[1]), ref(args[2]), int(args[3]))
        if kind == "implies":
            return ChannelImplies(ref(args[0]), int(args[1]), ref(args[2]), int(args[3]))
        if kind == "alldiff":
            return AllDifferent(tuple(map(ref, args)))
        if kind == "offset":
            return Offset(ref(args[0]), ref(args[1]), int(args[2]))
        if kind == "less":
            return Less(ref(args[0]), ref(args[1]))
        if kind == "seplink":
            return DualSepLink(ref(args[0]), int(args[1]), ref(args[2]), int(args[3]))
        if kind == "sum":
            return Sum(tuple(map(ref, args[1:])), int(args[0]))
        if kind == "wsum":
            terms = [t.split(":") for t in args[1:]]
            return Sum(tuple(ref(v) for v, _ in terms), int(args[0]),
                       tuple(int(w) for _, w in terms))
        if kind == "table":
            pairs = frozenset(tuple(map(int, p.split(","))) for p in args[2:])
            return BinaryTable(ref(args[0]), ref(args[1]), pairs)
        if kind == "forbid":
            return UnaryForbid(ref(args[0]), frozenset(map(int, args[1:])))
        if kind == "atmost":
            return AtMostCount(tuple(map(ref, args[1:])), int(args[0]))
    except (IndexError, KeyError, ValueError) as exc:
        raise ValueError(f"bad constraint line {text!r}") from exc
    raise ValueError(f"unknown constraint kind {kind!r}")


def dumps(problem: Problem) -> str:
    lines = [f"vars {problem.n} {problem.m}"]
    if problem.model is not None:
        lines.append(f"model {problem.model.cli_tag}")
    if problem.dummies:
        lines.append("dummies " + " ".join(map(str, sorted(problem.dummies))))
    for v, dom in problem.domains:
        lines.append(f"dom {v} " + " ".join(map(str, dom)))
    for c in problem.constraints:
        lines.append("ctr " + dump_constraint(c))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def loads(text: str) -> Problem:
    n = m = None
    model = None
    dummies: list[int] = []
    domains: dict[VarRef, Domain] = {}
    cons: list[Constraint] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        if head == "vars":
            n, m = map(int, rest.split())
        elif head == "model":
            model = parse_model(rest.strip())
        elif head == "dummies":
            dummies = [int(t) for t in rest.split()]
        elif head == "dom":
            name, *vals = rest.split()
            domains[VarRef.parse(name)] = Domain(int(t) for t in vals)
        elif head == "ctr":
            cons.append(parse_constraint(rest))
        else:
            raise ValueError(f"line {lineno}: unknown directive {head!r}")
    if n is None:
        raise ValueError("missing 'vars' header")
    return make_problem(n, m, domains, cons, model, dummies)
