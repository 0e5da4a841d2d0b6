import os

from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# acceptance criterion number -> (passed, detail), filled by test_acceptance
CRITERIA: dict[int, tuple[bool, str]] = {}
# per-cell comparison against the published fail counts
CELL_DIFF: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA and not CELL_DIFF:
        return
    tr = terminalreporter
    if CELL_DIFF:
        tr.section("reference cell diff")
        for line in CELL_DIFF:
            tr.write_line(line)
    tr.section("acceptance criteria")
    for k in sorted(CRITERIA):
        ok, detail = CRITERIA[k]
        tr.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
