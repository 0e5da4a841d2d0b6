"""Sweeps that check model equivalences and dominance empirically."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    ALLDIFF, ALLDIFF_C, ALLDIFF_C_ALLDIFF, ALLDIFF_C_NEQ, C, C1, C2, C3, C_ALLDIFF,
    C_NEQ, INJ_NEQ, NEQ, NEQ_C, NEQ_C_ALLDIFF, NEQ_C_NEQ, Block, Domain, ModelSpec,
    Problem, VarRef, build_injection_model, build_permutation_model,
    dual_equivalent_domains,
)
from .problems import langford, random_permutation_csp
from .propagate import DomainStore, propagate_fixpoint
from .sat import CHANNELLING_SAT, PRIMAL_SAT, LockstepReport, lockstep_compare
from .search import Algorithm, Goal, Heuristic, SearchConfig, solve

# models whose fixpoints coincide, with the block compared
CHANNEL_CLASS = (C, NEQ_C, C_NEQ, NEQ_C_NEQ)
ALLDIFF_CLASS = (ALLDIFF, ALLDIFF_C, C_ALLDIFF, ALLDIFF_C_NEQ, NEQ_C_ALLDIFF, ALLDIFF_C_ALLDIFF)
INJECTION_CLASS = (INJ_NEQ, C1, C2, C3)


def random_domain(rng: random.Random, lo: int, hi: int) -> Domain:
    """A non-empty random subset of lo..hi."""
    while True:
        vals = [v for v in range(lo, hi + 1) if rng.random() < 0.6]
        if vals:
            return Domain(vals)


def fixpoint(problem: Problem, primal: Sequence[Domain], block: Block | None = None):
    """Propagation fixpoint of ``problem`` from the given primal domains.

    Dual domains of a permutation are the equivalent ones; injection duals
    keep the model's own domains.  Returns ``None`` on a wipeout, otherwise
    the domains of ``block`` (all variables when ``block`` is None).
    """
    updates = dict(zip(problem.primal, primal))
    if problem.dual and problem.m == problem.n and not problem.dummies:
        updates.update(zip(problem.dual, dual_equivalent_domains(list(primal))))
    store = DomainStore(problem.with_domains(updates).domains)
    if not propagate_fixpoint(problem, store).ok:
        return None
    return {v: dom for v, dom in store.as_dict().items()
            if block is None or v.block == block}


@dataclass
class Mismatch:
    kind: str
    size: tuple[int, int]
    primal: list[Domain]
    models: tuple[str, str]


@dataclass
class SweepReport:
    checked: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _compare(report: SweepReport, kind: str, size, primal, results: dict[ModelSpec, object]):
    specs = list(results)
    ref = specs[0]
    for spec in specs[1:]:
        report.checked += 1
        if results[spec] != results[ref]:
            report.mismatches.append(Mismatch(kind, size, list(primal), (str(ref), str(spec))))


def fixpoint_sweep(count: int, seed: int = 0, max_n: int = 6,
                   max_injection: tuple[int, int] = (5, 8)) -> SweepReport:
    """Compare fixpoints of equivalent models on ``count`` random stores of
    each kind: permutation channelling models, all-different models and
    injection channelling models."""
    rng = random.Random(seed)
    report = SweepReport()
    perm = {spec: {} for spec in CHANNEL_CLASS + ALLDIFF_CLASS}
    inj: dict[tuple[int, int, ModelSpec], Problem] = {}
    for _ in range(count):
        n = rng.randint(2, max_n)
        primal = [random_domain(rng, 1, n) for _ in range(n)]
        res = {}
        for spec in CHANNEL_CLASS:
            prob = perm[spec].get(n) or perm[spec].setdefault(n, build_permutation_model(n, spec))
            res[spec] = fixpoint(prob, primal)
        _compare(report, "channel", (n, n), primal, res)
        res = {}
        for spec in ALLDIFF_CLASS:
            prob = perm[spec].get(n) or perm[spec].setdefault(n, build_permutation_model(n, spec))
            res[spec] = fixpoint(prob, primal, Block.PRIMAL)
        _compare(report, "alldiff", (n, n), primal, res)

        ni = rng.randint(2, max_injection[0])
        mi = rng.randint(ni + 1, max(ni + 1, max_injection[1]))
        primal = [random_domain(rng, 1, mi) for _ in range(ni)]
        res = {}
        for spec in INJECTION_CLASS:
            key = (ni, mi, spec)
            if key not in inj:
                inj[key] = build_injection_model(ni, mi, spec)
            res[spec] = fixpoint(inj[key], primal, Block.PRIMAL)
        _compare(report, "injection", (ni, mi), primal, res)
    return report


# --------------------------------------------------------------------------
# search dominance


DOMINANCE_CHAIN = ((ALLDIFF, Algorithm.MGAC), (C, Algorithm.MAC), (NEQ, Algorithm.MAC))


@dataclass
class DominanceRow:
    model: ModelSpec
    algorithm: Algorithm
    fails: int
    solutions: int


@dataclass
class DominanceReport:
    instance: str
    chain: list[DominanceRow]
    classes: dict[str, dict[str, int]]

    @property
    def ordered(self) -> bool:
        fails = [r.fails for r in self.chain]
        return all(a <= b for a, b in zip(fails, fails[1:]))

    @property
    def classes_equal(self) -> bool:
        return all(len(set(v.values())) == 1 for v in self.classes.values())

    @property
    def ok(self) -> bool:
        return self.ordered and self.classes_equal


def dominance(instance: str, goal: Goal = Goal.ALL, with_classes: bool = True,
              symmetry: bool = False) -> DominanceReport:
    """Fails of MGAC on all-different, MAC on channelling and MAC on
    not-equals under the static order, plus the fails of every model in the
    channelling and all-different equivalence classes."""
    from .problems import parse_instance

    inst = parse_instance(instance)

    def run(spec: ModelSpec, alg: Algorithm):
        options = {"symmetry": symmetry} if inst.kind == "langford" else {}
        problem = parse_instance(instance, spec).build(**options)
        _, stats = solve(problem, SearchConfig(alg, Heuristic.LEX, goal))
        return stats

    chain = []
    for spec, alg in DOMINANCE_CHAIN:
        st = run(spec, alg)
        chain.append(DominanceRow(spec, alg, st.fails, st.solutions))
    classes: dict[str, dict[str, int]] = {}
    if with_classes:
        for name, members in (("channel", CHANNEL_CLASS), ("alldiff", ALLDIFF_CLASS)):
            classes[name] = {}
            for spec in members:
                row = next((r for r in chain if r.model == spec), None)
                classes[name][spec.cli_tag] = row.fails if row else run(spec, Algorithm.AUTO).fails
    return DominanceReport(str(inst), chain, classes)


# --------------------------------------------------------------------------
# DP against FC


def lockstep_suite(seeds: int = 50, n: int = 5) -> list[tuple[str, LockstepReport]]:
    """Both SAT variants on Langford (2,3) and (2,4) and on seeded random
    permutation problems."""
    out = []
    problems = [(f"langford:2,{m}", langford(2, m, NEQ, symmetry=False)) for m in (3, 4)]
    problems += [(f"random:{n}:{s}", random_permutation_csp(n, NEQ, s)) for s in range(seeds)]
    for name, prob in problems:
        for variant in (PRIMAL_SAT, CHANNELLING_SAT):
            out.append((name, lockstep_compare(prob, variant)))
    return out
