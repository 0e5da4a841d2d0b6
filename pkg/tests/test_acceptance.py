"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line that is printed in the terminal summary.
Solver runs are cached for the session because the dominance and table
criteria share them.
"""

import random
import time
from itertools import combinations

import pytest

from conftest import CELL_DIFF, CRITERIA
from permuta.core import (
    C, NEQ, PERMUTATION_TAGS, AllDifferent, Domain, parse_model, x,
)
from permuta.lab import Level, brute_force_gac
from permuta.lab.fixtures import replay_fixtures
from permuta.lab.lattice import verify_lattice
from permuta.problems import golomb, is_golomb_ruler, langford, parse_instance, quasigroup
from permuta.propagate import DomainStore, enforce_gac_alldiff
from permuta.reference import REFERENCE, lookup
from permuta.search import Goal, Heuristic, SearchConfig, solve
from permuta.verify import (
    ALLDIFF_CLASS, CHANNEL_CLASS, DOMINANCE_CHAIN, DominanceReport, DominanceRow,
    fixpoint_sweep, lockstep_suite,
)
from test_problems import qg_oracle


def record(k, ok, detail):
    CRITERIA[k] = (ok, detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


_RUNS: dict[tuple, tuple[int, int]] = {}


def run(instance, tag, heuristic="lex", goal="all"):
    """(fails, solutions) of one benchmark run, symmetry breaking off."""
    key = (instance, tag, heuristic, goal)
    if key not in _RUNS:
        inst = parse_instance(instance, parse_model(tag))
        problem = inst.build(symmetry=False) if inst.kind == "langford" else inst.build()
        _, st = solve(problem, SearchConfig(heuristic=Heuristic(heuristic), goal=Goal(goal)))
        _RUNS[key] = (st.fails, st.solutions)
    return _RUNS[key]


LANGFORD = [f"langford:3,{m}" for m in (9, 10, 11, 12)]


def test_criterion_1_fixture_replay():
    start = time.perf_counter()
    results = replay_fixtures()
    elapsed = time.perf_counter() - start
    bad = [r for r in results if not r.ok]
    for r in bad:
        print(f"  {r.fixture}: {r.level.value}_{r.model} expected {r.expected}, got {r.actual}")
    detail = (f"{len(results) - len(bad)}/{len(results)} classifications as stated, "
              f"{elapsed:.2f}s (limit 1s)")
    if bad:
        detail += "; mismatched: " + ", ".join(
            f"{r.fixture} {r.level.value}_{r.model}" for r in bad)
    record(1, not bad and elapsed < 1.0, detail)


def test_criterion_2_exhaustive_lattice():
    parts, ok = [], True
    for n in (3, 4):
        start = time.perf_counter()
        report = verify_lattice(n)
        elapsed = time.perf_counter() - start
        broken = [f"{r.arrow} ({r.violations})" for r in report.results if r.violations]
        ok &= not broken and (n < 4 or elapsed < 300)
        parts.append(f"n={n}: {report.configs} configs, {report.violations} violations, "
                     f"{elapsed:.1f}s" + (f" [{'; '.join(broken)}]" if broken else ""))
    record(2, ok, " | ".join(parts))


def test_criterion_3_propagator_equivalences():
    report = fixpoint_sweep(1000, seed=0, max_n=6, max_injection=(5, 8))
    for m in report.mismatches[:5]:
        print(f"  {m.kind} {m.size} {m.models}: {m.primal}")
    record(3, report.ok, f"{report.checked} fixpoint comparisons over 1000 stores per kind, "
                         f"{len(report.mismatches)} mismatches")


def test_criterion_4_gac_oracle():
    rng = random.Random(0)
    bad = 0
    for _ in range(1000):
        n = rng.randint(2, 7)
        hi = n + rng.randint(0, 2)
        doms = {}
        for i in range(1, n + 1):
            dom = Domain(v for v in range(1, hi + 1) if rng.random() < 0.5)
            doms[x(i)] = dom or Domain([rng.randint(1, hi)])
        scope = tuple(doms)
        oracle = brute_force_gac(scope, lambda a: len(set(a.values())) == len(a), doms)
        expected = None if any(not oracle[v] for v in scope) else oracle
        store = DomainStore(doms)
        out = enforce_gac_alldiff(store, AllDifferent(scope))
        got = store.as_dict() if out.ok else None
        bad += got != expected
    record(4, bad == 0, f"1000 random all-different instances with n <= 7, {bad} disagreements")


def test_criterion_5_dp_fc_lockstep():
    results = lockstep_suite(seeds=50, n=5)
    bad = [(name, r.variant, r.divergence) for name, r in results if not r.equal]
    for b in bad[:5]:
        print("  divergence", b)
    record(5, not bad, f"{len(results)} lockstep comparisons (primal and channelling), "
                       f"{len(bad)} unequal")


def dominance_report(instance):
    chain = []
    for spec, alg in DOMINANCE_CHAIN:
        assert SearchConfig().resolve(langford(2, 3, spec)) is alg
        fails, sols = run(instance, spec.cli_tag)
        chain.append(DominanceRow(spec, alg, fails, sols))
    classes = {name: {spec.cli_tag: run(instance, spec.cli_tag)[0] for spec in members}
               for name, members in (("channel", CHANNEL_CLASS), ("alldiff", ALLDIFF_CLASS))}
    return DominanceReport(instance, chain, classes)


def test_criterion_6_search_dominance():
    parts, ok = [], True
    for instance in LANGFORD:
        rep = dominance_report(instance)
        ok &= rep.ok
        f = [r.fails for r in rep.chain]
        parts.append(f"{instance} {f[0]}<={f[1]}<={f[2]} "
                     f"{'ordered' if rep.ordered else 'NOT ordered'}, "
                     f"classes {'equal' if rep.classes_equal else 'differ'}")
    record(6, ok, " | ".join(parts))


# instances and goals whose published cells are compared
TABLE_RUNS = [
    (3, ["langford:3,9", "langford:3,10"]),
    (4, LANGFORD),
    (5, ["langford:3,12"]),
    (11, ["golomb:8,34", "golomb:9,44"]),
]
TABLE_NOTES = {
    11: "marks-based Golomb encoding, see the relation check",
}


def sign(v):
    return (v > 0) - (v < 0)


def test_criterion_7_table_reproduction():
    exact = total = 0
    relation_errors = []
    for table, instances in TABLE_RUNS:
        for instance in instances:
            cells = [c for c in REFERENCE if c.table == table and c.instance == instance]
            if table == 5:
                cells = [c for c in cells if c.model == "c" and c.heuristic in ("sd_pd", "sd_p")]
            ours = {}
            for c in cells:
                fails, _ = run(c.instance, c.model, c.heuristic, c.goal)
                ours[c] = fails
                total += 1
                exact += fails == c.fails
                note = "" if fails == c.fails else "  " + TABLE_NOTES.get(table, "")
                CELL_DIFF.append(f"table {table} {c.instance} {c.model} {c.heuristic} {c.goal}: "
                                 f"ours={fails} published={c.fails} delta={fails - c.fails}"
                                 + note.rstrip())
            for a, b in combinations(cells, 2):
                if sign(a.fails - b.fails) != sign(ours[a] - ours[b]):
                    relation_errors.append(
                        f"table {table} {instance}: {a.model}/{a.heuristic} vs "
                        f"{b.model}/{b.heuristic} published {a.fails}:{b.fails}, "
                        f"ours {ours[a]}:{ours[b]}")
    for line in relation_errors[:10]:
        print("  " + line)
    targets = [("langford:3,9", "first"), ("langford:3,9", "all"), ("langford:3,12", "all"),
               ("golomb:8,34", "first")]
    quoted = []
    for instance, goal in targets:
        tags = ("injection-alldiff", "injection-c2", "injection-neq") \
            if instance.startswith("golomb") else ("all-diff", "c", "neq")
        vals = [f"{t}={run(instance, t, 'lex', goal)[0]}/{lookup(instance, t, 'lex', goal).fails}"
                for t in tags]
        quoted.append(f"{instance} {goal}: " + " ".join(vals))
    detail = (f"{len(relation_errors)} within-table relation mismatches; "
              f"{exact}/{total} cells exact (diff in summary); " + " | ".join(quoted))
    record(7, not relation_errors, detail)


def test_criterion_8_heuristic_effect():
    pd, _ = run("langford:3,12", "c", "sd_pd", "all")
    p, _ = run("langford:3,12", "c", "sd_p", "all")
    record(8, pd < p, f"L(3,12) model c all solutions: SD_pd {pd} < SD_p {p} "
                      f"(published 11683 < 21148)")


def test_criterion_9_solution_counts():
    _, off = solve(langford(3, 9, C, symmetry=False), SearchConfig(goal=Goal.ALL))
    _, on = solve(langford(3, 9, C), SearchConfig(goal=Goal.ALL))
    _, qg = solve(quasigroup("qg3", 4, C), SearchConfig(goal=Goal.ALL))
    oracle = qg_oracle("qg3", 4)
    marks = [0, 1, 4, 9, 11]
    dists = {b - a for a, b in combinations(marks, 2)}
    ruler_ok = is_golomb_ruler(marks) and 6 not in dists
    ok = off.solutions == 6 and on.solutions == 3 and qg.solutions == oracle and ruler_ok
    record(9, ok, f"L(3,9) {off.solutions} solutions without symmetry breaking, "
                  f"{on.solutions} with; QG3(4) {qg.solutions} vs oracle {oracle}; "
                  f"ruler 0,1,4,9,11 {'valid' if ruler_ok else 'INVALID'}, distance 6 absent")
