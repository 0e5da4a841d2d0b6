import csv
import io
import subprocess
import sys

import pytest

from permuta.cli import (
    EXIT_ABORT, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, SOLVE_COLUMNS, main,
)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_solve_reports_delta(capsys):
    code = main(["solve", "--instance", "langford:3,9", "--model", "all-diff",
                 "--heuristic", "lex", "--goal", "first"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert out.splitlines()[0].split(",") == SOLVE_COLUMNS
    (row,) = rows(out)
    assert row["fails"] == "12" and row["ref_fails"] == "12" and row["delta"] == "0"
    assert row["algorithm"] == "mgac"


def test_solve_without_reference_leaves_delta_empty(capsys):
    assert main(["solve", "--instance", "langford:2,4", "--model", "c"]) == EXIT_OK
    (row,) = rows(capsys.readouterr().out)
    assert row["ref_fails"] == "" and row["delta"] == ""
    assert row["solutions"] == "1"


def test_solve_magic_first(capsys):
    main(["solve", "--instance", "magic:3", "--model", "c", "--heuristic", "sd2_pd"])
    (row,) = rows(capsys.readouterr().out)
    assert row["solutions"] == "1"
    assert row["ref_fails"] == "5"
    assert int(row["delta"]) == int(row["fails"]) - 5


def test_solve_symmetry_skips_reference(capsys):
    main(["solve", "--instance", "langford:3,9", "--goal", "all", "--symmetry"])
    (row,) = rows(capsys.readouterr().out)
    assert row["solutions"] == "3" and row["delta"] == ""


def test_bad_model_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--instance", "langford:3,9", "--model", "bogus"])
    assert exc.value.code == EXIT_USAGE


def test_bad_instance_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--instance", "golomb:8"])
    assert exc.value.code == EXIT_USAGE


def test_time_limit_aborts(capsys):
    code = main(["solve", "--instance", "langford:3,11", "--model", "neq", "--goal", "all",
                 "--time-limit", "0.05"])
    captured = capsys.readouterr()
    assert code == EXIT_ABORT
    assert "aborted" in captured.err
    assert len(rows(captured.out)) == 1


def test_reference_listing(capsys):
    assert main(["reference", "--table", "3"]) == EXIT_OK
    table = rows(capsys.readouterr().out)
    assert len(table) == 22 and {r["table"] for r in table} == {"3"}


def test_verify_lattice_small(capsys):
    assert main(["verify", "lattice", "--n", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "config_id,level_pair,model_pair,verdict,witness"


def test_verify_lattice_rejects_n(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "lattice", "--n", "5"])
    assert exc.value.code == EXIT_USAGE


def test_verify_dominance_langford_2_4(capsys):
    code = main(["verify", "dominance", "--instance", "langford:2,4", "--sweep", "30"])
    out = rows(capsys.readouterr().out)
    chain = [int(r["fails"]) for r in out if r["check"] == "chain"]
    assert chain == sorted(chain)
    assert code == EXIT_OK


def test_verify_fixtures_exit_code(capsys):
    code = main(["verify", "fixtures"])
    out = rows(capsys.readouterr().out)
    bad = [r for r in out if r["ok"] == "False"]
    assert code == (EXIT_VIOLATION if bad else EXIT_OK)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "permuta.cli", "reference", "--table", "11"],
                          capture_output=True, text=True, check=True)
    assert len(proc.stdout.splitlines()) == 17
