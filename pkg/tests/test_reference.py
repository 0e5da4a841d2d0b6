from permuta.core import _CLI_TAGS
from permuta.problems import parse_instance
from permuta.reference import REFERENCE, cells_for_table, lookup
from permuta.search import Goal, Heuristic


def test_cells_unique_per_run():
    keys = [(c.instance, c.model, c.heuristic, c.goal) for c in REFERENCE]
    assert len(keys) == len(set(keys))


def test_cells_are_well_formed():
    tags = set(_CLI_TAGS.values())
    heuristics = {h.value for h in Heuristic}
    goals = {g.value for g in Goal}
    for c in REFERENCE:
        assert 3 <= c.table <= 13
        assert c.model in tags and c.heuristic in heuristics and c.goal in goals
        assert str(parse_instance(c.instance)) == c.instance
        assert c.fails >= 0


def test_lookup():
    cell = lookup("langford:3,9", "all-diff", "lex", "first")
    assert cell.fails == 12 and cell.table == 3
    assert lookup("langford:3,9", "all-diff", "lex", "all").fails == 2006
    assert lookup("golomb:8,34", "injection-c2", "lex", "first").fails == 104
    assert lookup("langford:2,4", "c", "lex", "first") is None


def test_missing_results_are_skipped():
    assert lookup("golomb:9,44", "neq", "sd_p", "all") is None
    assert len(cells_for_table(11)) == 16
    assert len(cells_for_table(13)) == 14 * 3 - 6
