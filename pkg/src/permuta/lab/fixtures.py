"""Proof instances and their expected classifications (see fixtures.txt)."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations

from ..core import (
    AllDifferent, Block, Constraint, Domain, ModelSpec, NotEquals, VarRef, d,
    parse_model,
)
from ..serialize import parse_constraint
from .levels import Level, check_level
from .network import BinaryNetwork, injection_network, permutation_network

# injection model with not-equals on both primal and dual variables
NEQ_C2_NEQ = ModelSpec("≠c2≠", "neq", "c2", "neq", injection=True)

_EXTRA_TAGS = {"injection-neq-c2-neq": NEQ_C2_NEQ}


def model_from_tag(tag: str) -> ModelSpec:
    return _EXTRA_TAGS.get(tag) or parse_model(tag)


@dataclass
class Fixture:
    name: str
    kind: str  # permutation | injection | network
    domains: dict[VarRef, Domain]
    constraints: list[Constraint] = field(default_factory=list)
    expect: list[tuple[Level, str, bool]] = field(default_factory=list)
    n: int = 0
    m: int = 0

    @property
    def primal_domains(self) -> list[Domain]:
        return [dom for v, dom in sorted(self.domains.items()) if v.block == Block.PRIMAL]

    def network(self, tag: str) -> BinaryNetwork:
        """The network of model ``tag`` on this instance."""
        if self.kind == "permutation":
            return permutation_network(model_from_tag(tag), self.primal_domains,
                                       extra=self.constraints)
        if self.kind == "injection":
            spec = model_from_tag(tag)
            duals = None
            if any(v.block == Block.DUAL for v in self.domains):
                duals = [self.domains[d(j)] for j in range(1, self.m + 1)]
            return injection_network(spec, self.n, self.m, self.primal_domains, duals,
                                     self.constraints)
        primal = {v: dom for v, dom in self.domains.items() if v.block == Block.PRIMAL}
        if tag == "neq":
            cons: list[Constraint] = []
            for c in self.constraints:
                if isinstance(c, AllDifferent):
                    cons.extend(NotEquals(a, b) for a, b in combinations(c.vars, 2))
                else:
                    cons.append(c)
            return BinaryNetwork.from_constraints(primal, cons)
        if tag == "all-diff":
            return BinaryNetwork.from_constraints(primal, self.constraints)
        raise ValueError(f"network fixtures support neq and all-diff, not {tag!r}")

    def classify(self, level: Level | str, tag: str) -> bool:
        return check_level(self.network(tag), level)


@dataclass
class FixtureResult:
    fixture: str
    level: Level
    model: str
    expected: bool
    actual: bool

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


def parse_fixtures(text: str) -> list[Fixture]:
    out: list[Fixture] = []
    cur: Fixture | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            cur = Fixture(line[1:-1], "permutation", {})
            out.append(cur)
            continue
        if cur is None:
            raise ValueError(f"line {lineno}: content before the first block")
        head, *args = line.split()
        if head == "kind":
            cur.kind = args[0]
            if cur.kind == "injection":
                cur.n, cur.m = int(args[1]), int(args[2])
            elif cur.kind not in ("permutation", "network"):
                raise ValueError(f"line {lineno}: unknown kind {cur.kind!r}")
        elif head == "dom":
            cur.domains[VarRef.parse(args[0])] = Domain(int(a) for a in args[1:])
        elif head == "ctr":
            cur.constraints.append(parse_constraint(" ".join(args)))
        elif head == "expect":
            level, tag, value = args
            if value not in ("true", "false"):
                raise ValueError(f"line {lineno}: expected true or false")
            cur.expect.append((Level(level), tag, value == "true"))
        else:
            raise ValueError(f"line {lineno}: unknown directive {head!r}")
    for fx in out:
        if fx.kind == "permutation":
            fx.n = fx.m = len(fx.primal_domains)
    return out


def load_fixtures() -> list[Fixture]:
    text = resources.files(__package__).joinpath("fixtures.txt").read_text(encoding="utf-8")
    return parse_fixtures(text)


def replay_fixtures(fixtures: list[Fixture] | None = None) -> list[FixtureResult]:
    """Classify every expectation of every fixture."""
    results = []
    for fx in fixtures if fixtures is not None else load_fixtures():
        for level, tag, expected in fx.expect:
            results.append(FixtureResult(fx.name, level, tag, expected, fx.classify(level, tag)))
    return results


__all__ = [
    "Fixture", "FixtureResult", "NEQ_C2_NEQ", "load_fixtures", "model_from_tag",
    "parse_fixtures", "replay_fixtures",
]
