"""Exhaustive or sampled verification of the tightness lattice on single
permutations.

An arrow ``A -> B`` between (level, model) nodes claims that whenever A
holds on some primal domains, B holds on the equivalent domains, and that
the converse fails somewhere.  ``<->`` claims implication both ways and
``x`` claims a witness in each direction.
"""

from __future__ import annotations

import csv
import io
import os
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from ..core import ALLDIFF, C, NEQ, NEQ_C, NEQ_C_NEQ, Domain, ModelSpec
from .fixtures import Fixture, load_fixtures
from .levels import Level, check_level
from .network import BinaryNetwork, _permutation_template, permutation_configs_masks

Node = tuple[Level, ModelSpec]

IMPLIES = "->"
EQUIVALENT = "<->"
INCOMPARABLE = "x"

IMPLIED = "Implied"
VIOLATED = "Violated"
INCOMPARABLE_VERDICT = "Incomparable"

LATTICE_MODELS = (NEQ_C_NEQ, NEQ_C, C, NEQ)


@dataclass(frozen=True)
class Arrow:
    stronger: Node
    weaker: Node
    kind: str

    def __str__(self) -> str:
        a, b = self.stronger, self.weaker
        return f"{a[0].value}_{a[1]} {self.kind} {b[0].value}_{b[1]}"


def lattice_arrows() -> list[Arrow]:
    """Arrows claimed for a single permutation, row by row and column by column."""
    L = Level
    g = (L.GAC, ALLDIFF)
    out: list[Arrow] = []

    def row(level: Level, links: Sequence[str], tail: list[tuple[Node, Node, str]]):
        nodes = [(level, m) for m in LATTICE_MODELS]
        for (a, b), kind in zip(zip(nodes, nodes[1:]), links):
            out.append(Arrow(a, b, kind))
        out.extend(Arrow(a, b, k) for a, b, k in tail)

    ac_c = (L.AC, C)
    row(L.ACPC, ["<->", "<->", "->"],
        [(g, (L.ACPC, NEQ_C_NEQ), "x"), ((L.ACPC, NEQ), ac_c, "x")])
    row(L.SAC, ["<->", "<->", "->"],
        [(g, (L.SAC, NEQ_C_NEQ), "->"), ((L.SAC, NEQ), ac_c, "x")])
    for level in (L.PIC, L.RPC):
        row(level, ["->", "->", "x"],
            [(g, (level, NEQ_C_NEQ), "->"), ((level, NEQ), ac_c, "x")])
    row(L.AC, ["<->", "<->", "->"],
        [(g, (L.AC, NEQ_C_NEQ), "->"), ((L.AC, NEQ), (L.BC, NEQ), "->")])
    row(L.BC, ["<->", "<->", "->"], [((L.BC, ALLDIFF), (L.BC, NEQ_C_NEQ), "->")])
    column = [L.ACPC, L.SAC, L.PIC, L.RPC, L.AC, L.BC]
    for m in LATTICE_MODELS:
        for hi, lo in zip(column, column[1:]):
            out.append(Arrow((hi, m), (lo, m), "->"))
    out.append(Arrow(g, (L.BC, ALLDIFF), "->"))
    return list(dict.fromkeys(out))


# --------------------------------------------------------------------------
# evaluation


_ABOVE_AC = (Level.RPC, Level.PIC, Level.SAC, Level.ACPC)


class _Evaluator:
    """Evaluates nodes on primal bitmask configurations, caching networks."""

    def __init__(self, values: Sequence[int]):
        self.values = list(values)
        self.templates: dict[ModelSpec, BinaryNetwork] = {}

    def network(self, spec: ModelSpec, masks: Sequence[int]) -> BinaryNetwork:
        tmpl = self.templates.get(spec)
        if tmpl is None:
            tmpl = self.templates[spec] = _permutation_template(spec, tuple(self.values), ())
        return tmpl.with_domains(permutation_configs_masks(tmpl, masks, self.values))

    def evaluate(self, nodes: Iterable[Node], masks: Sequence[int]) -> dict[Node, bool]:
        out: dict[Node, bool] = {}
        nets: dict[ModelSpec, BinaryNetwork] = {}
        ac: dict[ModelSpec, bool] = {}
        for level, spec in nodes:
            net = nets.get(spec)
            if net is None:
                net = nets[spec] = self.network(spec, masks)
            if level in _ABOVE_AC:
                if spec not in ac:
                    ac[spec] = check_level(net, Level.AC)
                if not ac[spec]:
                    out[(level, spec)] = False
                    continue
            out[(level, spec)] = check_level(net, level)
        return out


@dataclass
class Witness:
    config_id: str
    masks: tuple[int, ...]

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.masks)) + "]"


@dataclass
class ArrowResult:
    arrow: Arrow
    # A holds but B does not: a counterexample to A implying B
    forward: Witness | None = None
    forward_count: int = 0
    # B holds but A does not
    backward: Witness | None = None
    backward_count: int = 0

    @property
    def verdict(self) -> str:
        if self.forward is None:
            return IMPLIED
        if self.backward is not None:
            return INCOMPARABLE_VERDICT
        return VIOLATED

    @property
    def violations(self) -> int:
        """Configurations contradicting a claimed implication."""
        if self.arrow.kind == INCOMPARABLE:
            return 0
        count = self.forward_count
        if self.arrow.kind == EQUIVALENT:
            count += self.backward_count
        return count

    @property
    def witnessed(self) -> bool:
        """Whether the strictness or incomparability the arrow claims was seen."""
        if self.arrow.kind == IMPLIES:
            return self.backward is not None
        if self.arrow.kind == INCOMPARABLE:
            return self.forward is not None and self.backward is not None
        return True

    @property
    def holds(self) -> bool:
        return self.violations == 0 and self.witnessed


@dataclass
class LatticeReport:
    n: int
    configs: int
    results: list[ArrowResult] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(r.violations for r in self.results)

    @property
    def unwitnessed(self) -> list[ArrowResult]:
        return [r for r in self.results if not r.witnessed]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["config_id", "level_pair", "model_pair", "verdict", "witness"])
        for r in self.results:
            a, b = r.arrow.stronger, r.arrow.weaker
            verdict = r.verdict
            if verdict == IMPLIED:
                wit = r.backward
            elif verdict == VIOLATED:
                wit = r.forward
            else:
                wit = None
            if verdict == INCOMPARABLE_VERDICT:
                config = f"{r.forward.config_id};{r.backward.config_id}"
                shown = f"{r.forward};{r.backward}"
            else:
                config = wit.config_id if wit else ""
                shown = str(wit) if wit else ""
            writer.writerow([config, f"{a[0].value}>{b[0].value}", f"{a[1]}>{b[1]}",
                             verdict, shown])
        return buf.getvalue()


EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class Sample:
    count: int
    seed: int | None = None


def default_seed() -> int:
    return int(os.environ.get("PERMUTA_SEED", "0"))


def _configs(n: int, mode) -> Iterable[tuple[str, tuple[int, ...]]]:
    full = (1 << n) - 1
    if mode == EXHAUSTIVE:
        # lexicographic over the domain bitmasks
        for k, cfg in enumerate(product(range(1, full + 1), repeat=n)):
            yield str(k), tuple(c << 1 for c in cfg)
        return
    seed = mode.seed if mode.seed is not None else default_seed()
    rng = random.Random(seed)
    for k in range(mode.count):
        yield f"s{seed}:{k}", tuple(rng.randint(1, full) << 1 for _ in range(n))


def verify_lattice(n: int, levels: Iterable[Level] | None = None,
                   models: Iterable[ModelSpec] | None = None, mode=EXHAUSTIVE,
                   fixtures: list[Fixture] | None = None) -> LatticeReport:
    """Check every lattice arrow whose nodes fall within ``levels`` and
    ``models`` on all (or sampled) primal domain configurations of size n.

    Missing strictness and incomparability witnesses are then looked for
    among the permutation fixtures, whatever their size.
    """
    if not 1 <= n <= 5:
        raise ValueError("n must be between 1 and 5")
    if mode == EXHAUSTIVE and n > 4:
        raise ValueError("exhaustive enumeration is limited to n <= 4")
    lv = set(levels) if levels is not None else set(Level)
    ms = set(models) if models is not None else set(LATTICE_MODELS) | {ALLDIFF}
    arrows = [a for a in lattice_arrows()
              if {a.stronger[0], a.weaker[0]} <= lv and {a.stronger[1], a.weaker[1]} <= ms]
    nodes = sorted({nd for a in arrows for nd in (a.stronger, a.weaker)},
                   key=lambda nd: (list(Level).index(nd[0]), nd[1].symbol))
    results = [ArrowResult(a) for a in arrows]
    ev = _Evaluator(range(1, n + 1))
    # renaming primal variables preserves every level, so configurations
    # equal up to order share one evaluation
    seen: dict[tuple[int, ...], dict[Node, bool]] = {}
    configs = 0
    for config_id, masks in _configs(n, mode):
        configs += 1
        key = tuple(sorted(masks))
        truth = seen.get(key)
        if truth is None:
            truth = seen[key] = ev.evaluate(nodes, masks)
        for r in results:
            a, b = truth[r.arrow.stronger], truth[r.arrow.weaker]
            if a and not b:
                r.forward_count += 1
                if r.forward is None:
                    r.forward = Witness(config_id, masks)
            elif b and not a:
                r.backward_count += 1
                if r.backward is None:
                    r.backward = Witness(config_id, masks)
    _replay_witnesses(results, fixtures)
    return LatticeReport(n, configs, results)


def _replay_witnesses(results: list[ArrowResult], fixtures: list[Fixture] | None) -> None:
    pending = [r for r in results if not r.witnessed]
    if not pending:
        return
    fixtures = [fx for fx in (fixtures if fixtures is not None else load_fixtures())
                if fx.kind == "permutation" and not fx.constraints]
    for fx in fixtures:
        doms = fx.primal_domains
        values = sorted({v for dom in doms for v in dom})
        if len(values) != len(doms):
            values = list(range(1, len(doms) + 1))
        if any(v not in values for dom in doms for v in dom):
            continue
        ev = _Evaluator(values)
        masks = tuple(dom.mask for dom in doms)
        nodes = {nd for r in pending for nd in (r.arrow.stronger, r.arrow.weaker)}
        truth = ev.evaluate(nodes, masks)
        for r in pending:
            a, b = truth[r.arrow.stronger], truth[r.arrow.weaker]
            wit = Witness(f"fixture:{fx.name}", masks)
            if a and not b and r.forward is None and r.arrow.kind == INCOMPARABLE:
                r.forward = wit
            elif b and not a and r.backward is None:
                r.backward = wit
        pending = [r for r in pending if not r.witnessed]
        if not pending:
            return


def domains_of(masks: Sequence[int]) -> list[Domain]:
    return [Domain.from_mask(m) for m in masks]
