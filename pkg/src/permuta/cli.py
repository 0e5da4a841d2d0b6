"""Command-line front end: ``permuta solve``, ``permuta verify`` and
``permuta reference``."""

from __future__ import annotations

import argparse
import csv
import sys
from typing import Sequence

from .core import _CLI_TAGS, parse_model
from .problems import parse_instance
from .reference import REFERENCE, lookup
from .search import Algorithm, Goal, Heuristic, SearchConfig, solve

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_ABORT = 3

SOLVE_COLUMNS = ["instance", "model", "heuristic", "algorithm", "goal", "fails", "nodes",
                 "solutions", "time_ms", "ref_fails", "delta"]

MODEL_TAGS = sorted(_CLI_TAGS.values())


def _writer():
    return csv.writer(sys.stdout, lineterminator="\n")


def cmd_solve(args, parser) -> int:
    try:
        spec = parse_model(args.model)
        inst = parse_instance(args.instance, spec)
        options = {"symmetry": args.symmetry} if inst.kind == "langford" else {}
        problem = inst.build(**options)
    except ValueError as exc:
        parser.error(str(exc))
    config = SearchConfig(Algorithm(args.algorithm), Heuristic(args.heuristic), Goal(args.goal),
                          time_limit=args.time_limit)
    _, stats = solve(problem, config)
    ref = None if args.symmetry else lookup(str(inst), args.model, args.heuristic, args.goal)
    w = _writer()
    w.writerow(SOLVE_COLUMNS)
    w.writerow([str(inst), args.model, args.heuristic, config.resolve(problem).value, args.goal,
                stats.fails, stats.nodes, stats.solutions, f"{stats.time_ms:.1f}",
                "" if ref is None else ref.fails,
                "" if ref is None else stats.fails - ref.fails])
    if stats.aborted:
        print(f"aborted: time limit of {args.time_limit}s reached, statistics are partial",
              file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def cmd_reference(args, parser) -> int:
    w = _writer()
    w.writerow(["table", "instance", "model", "heuristic", "goal", "fails"])
    for c in REFERENCE:
        if args.table is None or c.table == args.table:
            w.writerow([c.table, c.instance, c.model, c.heuristic, c.goal, c.fails])
    return EXIT_OK


def cmd_fixtures(args, parser) -> int:
    from .lab.fixtures import replay_fixtures

    results = replay_fixtures()
    w = _writer()
    w.writerow(["fixture", "level", "model", "expected", "actual", "ok"])
    for r in results:
        w.writerow([r.fixture, r.level.value, r.model, r.expected, r.actual, r.ok])
    bad = sum(not r.ok for r in results)
    print(f"{len(results) - bad}/{len(results)} classifications as expected", file=sys.stderr)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_lattice(args, parser) -> int:
    from .lab.lattice import EXHAUSTIVE, Sample, verify_lattice

    mode = EXHAUSTIVE if args.sample is None else Sample(args.sample, args.seed)
    try:
        report = verify_lattice(args.n, mode=mode)
    except ValueError as exc:
        parser.error(str(exc))
    sys.stdout.write(report.to_csv())
    print(f"n={report.n} configurations={report.configs} violations={report.violations}",
          file=sys.stderr)
    for r in report.results:
        if r.violations:
            print(f"violated: {r.arrow} ({r.violations} configurations)", file=sys.stderr)
    for r in report.unwitnessed:
        print(f"unwitnessed: {r.arrow}", file=sys.stderr)
    return EXIT_VIOLATION if report.violations else EXIT_OK


def cmd_lockstep(args, parser) -> int:
    from .verify import lockstep_suite

    w = _writer()
    w.writerow(["problem", "variant", "fc_branches", "dp_branches", "solutions", "equal"])
    bad = 0
    for name, r in lockstep_suite(args.seeds):
        w.writerow([name, r.variant, r.fc_branches, r.dp_branches, r.fc_solutions, r.equal])
        if not r.equal:
            bad += 1
            print(f"{name} {r.variant}: first divergence {r.divergence}", file=sys.stderr)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_dominance(args, parser) -> int:
    from .verify import dominance, fixpoint_sweep

    try:
        report = dominance(args.instance, Goal(args.goal), with_classes=not args.no_classes)
    except ValueError as exc:
        parser.error(str(exc))
    w = _writer()
    w.writerow(["instance", "check", "model", "algorithm", "fails"])
    for row in report.chain:
        w.writerow([report.instance, "chain", row.model.cli_tag, row.algorithm.value, row.fails])
    for name, members in report.classes.items():
        for tag, fails in members.items():
            w.writerow([report.instance, f"class:{name}", tag, "", fails])
    sweep = fixpoint_sweep(args.sweep, args.seed)
    for m in sweep.mismatches:
        print(f"fixpoint mismatch {m.kind} {m.size} {m.models}: {m.primal}", file=sys.stderr)
    print(f"ordered={report.ordered} classes_equal={report.classes_equal} "
          f"fixpoint_checks={sweep.checked} mismatches={len(sweep.mismatches)}", file=sys.stderr)
    return EXIT_OK if report.ok and sweep.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permuta", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance and print a CSV row")
    p.add_argument("--instance", required=True,
                   help="langford:n,m golomb:n,m qg3:m qg4:m sport:n magic:n")
    p.add_argument("--model", "--mode", dest="model", default="all-diff", choices=MODEL_TAGS)
    p.add_argument("--heuristic", default="lex", choices=[h.value for h in Heuristic])
    p.add_argument("--algorithm", default="auto", choices=[a.value for a in Algorithm])
    p.add_argument("--goal", default="first", choices=[g.value for g in Goal])
    p.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    p.add_argument("--symmetry", action="store_true",
                   help="break Langford's reversal symmetry (reference cells assume it off)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reference", help="list the embedded reference fail counts")
    p.add_argument("--table", type=int, default=None)
    p.set_defaults(func=cmd_reference)

    p = sub.add_parser("verify", help="run a verification suite")
    vsub = p.add_subparsers(dest="suite", required=True)
    v = vsub.add_parser("fixtures", help="replay the counterexample fixtures")
    v.set_defaults(func=cmd_fixtures)
    v = vsub.add_parser("lattice", help="check the consistency lattice on size-n permutations")
    v.add_argument("--n", type=int, default=3)
    v.add_argument("--sample", type=int, default=None, metavar="COUNT",
                   help="sample COUNT configurations instead of enumerating")
    v.add_argument("--seed", type=int, default=None, help="defaults to $PERMUTA_SEED or 0")
    v.set_defaults(func=cmd_lattice)
    v = vsub.add_parser("lockstep", help="compare DP and FC branch counts")
    v.add_argument("--seeds", type=int, default=50)
    v.set_defaults(func=cmd_lockstep)
    v = vsub.add_parser("dominance", help="fixpoint equivalences and fail-count ordering")
    v.add_argument("--instance", default="langford:2,4")
    v.add_argument("--goal", default="all", choices=[g.value for g in Goal])
    v.add_argument("--no-classes", action="store_true",
                   help="skip the per-class fail comparison")
    v.add_argument("--sweep", type=int, default=200, metavar="COUNT",
                   help="random stores per kind in the fixpoint sweep")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_dominance)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
