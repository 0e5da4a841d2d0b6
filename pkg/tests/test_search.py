from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from permuta.core import (
    ALLDIFF, C, NEQ, PERMUTATION_TAGS, Domain, build_permutation_model, d, x,
)
from permuta.engine import Engine
from permuta.problems import langford, random_permutation_csp
from permuta.propagate import DomainStore
from permuta.search import (
    Algorithm, Goal, Heuristic, SearchConfig, Trail, select_value_order,
    select_variable, solve,
)


def test_langford_3_9_first_alldiff():
    _, st_ = solve(langford(3, 9, ALLDIFF, symmetry=False),
                   SearchConfig(Algorithm.MGAC, Heuristic.LEX, Goal.FIRST))
    assert st_.fails == 12


def test_langford_3_9_first_neq():
    _, st_ = solve(langford(3, 9, NEQ, symmetry=False),
                   SearchConfig(Algorithm.MAC, Heuristic.LEX, Goal.FIRST))
    assert st_.fails == 25


def test_langford_3_9_first_channel():
    _, st_ = solve(langford(3, 9, C, symmetry=False), SearchConfig(goal=Goal.FIRST))
    assert st_.fails == 12


@pytest.mark.parametrize("spec", PERMUTATION_TAGS)
def test_single_variable_permutation(spec):
    sols, st_ = solve(build_permutation_model(1, spec), SearchConfig(goal=Goal.ALL))
    assert st_.solutions == 1 and st_.fails == 0
    assert sols == [{x(1): 1}]


@pytest.mark.parametrize("spec", PERMUTATION_TAGS)
def test_all_permutations_found(spec):
    sols, st_ = solve(build_permutation_model(4, spec), SearchConfig(goal=Goal.ALL))
    assert st_.solutions == 24
    assert {tuple(s[x(i)] for i in range(1, 5)) for s in sols} == set(permutations(range(1, 5)))


def test_dway_branching_finds_same_solutions():
    p = langford(2, 4, NEQ, symmetry=False)
    binary, _ = solve(p, SearchConfig(goal=Goal.ALL))
    dway, _ = solve(p, SearchConfig(goal=Goal.ALL, branching="dway"))
    key = lambda s: sorted(s.items())
    assert sorted(map(key, binary)) == sorted(map(key, dway))


def test_unknown_branching_rejected():
    with pytest.raises(ValueError):
        solve(build_permutation_model(2, NEQ), SearchConfig(branching="nary"))


def test_auto_algorithm():
    assert SearchConfig().resolve(build_permutation_model(3, ALLDIFF)) is Algorithm.MGAC
    assert SearchConfig().resolve(build_permutation_model(3, C)) is Algorithm.MAC


def test_dual_heuristic_needs_dual_block():
    with pytest.raises(ValueError):
        solve(build_permutation_model(3, NEQ), SearchConfig(heuristic=Heuristic.SD_PD))


def test_time_limit_aborts():
    _, st_ = solve(langford(3, 10, NEQ, symmetry=False),
                   SearchConfig(goal=Goal.ALL, time_limit=0.05))
    assert st_.aborted


def store(**doms):
    return DomainStore({(x if k[0] == "x" else d)(int(k[1:])): Domain(v) for k, v in doms.items()})


def test_lex_picks_first_unbound():
    s = store(x1={1}, x2={1, 2}, x3={1, 2})
    assert select_variable(s, SearchConfig()) == x(2)


def test_sd_pd_tie_goes_to_primal():
    s = store(x1={1, 2, 3}, x2={1, 2}, d1={1, 2}, d2={1, 2, 3, 4})
    assert select_variable(s, SearchConfig(heuristic=Heuristic.SD_PD)) == x(2)


def test_singletons_first():
    s = store(x1={1, 2}, x2={1, 2}, x3={7})
    for h in Heuristic:
        cfg = SearchConfig(heuristic=h)
        assert select_variable(s, cfg, assigned=set()) == x(3)


def test_value_orders():
    s = store(x1={3, 1, 2})
    assert select_value_order(s, x(1), SearchConfig()) == [1, 2, 3]
    s = store(x1={1, 2}, d1={1, 2, 3}, d2={2})
    assert select_value_order(s, x(1), SearchConfig(heuristic=Heuristic.SD2_PD)) == [2, 1]
    s = store(x1={1, 2, 3}, d1={1, 2}, d2={1, 2}, d3={1, 2})
    assert select_value_order(s, x(1), SearchConfig(heuristic=Heuristic.SD2_PD)) == [1, 2, 3]


def test_trail_restores_store():
    eng = Engine(build_permutation_model(4, C))
    eng.schedule_all()
    assert eng.propagate()
    before = list(eng.dom)
    t = Trail(eng)
    t.push(0, 2)
    assert eng.set_dom(0, 1 << 2) and eng.propagate()
    t.push(1, 1)
    assert eng.set_dom(1, 1 << 1) and eng.propagate()
    assert eng.dom != before
    assert t.pop() == (1, 1)
    assert t.pop() == (0, 2)
    assert eng.dom == before and len(t) == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 5), st.integers(0, 10 ** 6), st.sampled_from(list(Heuristic)))
def test_stats_invariants_and_solutions_valid(n, seed, heuristic):
    p = random_permutation_csp(n, C, seed)
    sols, st_ = solve(p, SearchConfig(heuristic=heuristic, goal=Goal.ALL))
    assert 0 <= st_.fails <= st_.nodes + 1
    assert st_.solutions == len(sols)
    for s in sols:
        assert sorted(s[v] for v in p.primal) == list(range(1, n + 1))
    expected = 0
    for perm in permutations(range(1, n + 1)):
        full = {x(i): perm[i - 1] for i in range(1, n + 1)}
        full.update({d(perm[i - 1]): i for i in range(1, n + 1)})
        expected += p.is_solution(full)
    assert st_.solutions == expected
