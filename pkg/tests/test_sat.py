from itertools import permutations
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from permuta.core import NEQ, ChannelImplies, UnaryForbid, d, x
from permuta.problems import langford, random_permutation_csp
from permuta.sat import (
    CHANNELLING_SAT, CONFLICT, OK, PRIMAL_SAT, ClauseSet, atom, atom_pair, count_models,
    dp_solve, encode_direct, lockstep_compare, unit_propagate,
)


def test_primal_clause_count():
    cs = encode_direct(3, PRIMAL_SAT)
    assert cs.num_atoms == 9 and len(cs.clauses) == 21


def test_channelling_clause_count():
    assert len(encode_direct(3, CHANNELLING_SAT).clauses) == 24


def test_single_atom():
    cs = encode_direct(1)
    assert cs.num_atoms == 1 and cs.clauses == [(1,)]


@pytest.mark.parametrize("variant", [PRIMAL_SAT, CHANNELLING_SAT])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_models_are_permutations(variant, n):
    assert count_models(encode_direct(n, variant)) == factorial(n)


def test_clauses_clean():
    for variant in (PRIMAL_SAT, CHANNELLING_SAT):
        for c in encode_direct(4, variant).clauses:
            assert len(set(c)) == len(c)
            assert not any(-lit in c for lit in c)


def test_add_drops_tautology_and_duplicates():
    cs = ClauseSet(2, PRIMAL_SAT)
    cs.add((1, -1))
    cs.add((2, 2, 3))
    assert cs.clauses == [(2, 3)]


@given(st.integers(1, 9), st.integers(1, 9))
def test_atom_roundtrip(i, j):
    n = max(i, j)
    assert atom_pair(atom(i, j, n), n) == (i, j)


def test_dimacs_header():
    text = encode_direct(2).to_dimacs()
    lines = text.splitlines()
    assert lines[0] == "p cnf 4 6"
    assert all(line.endswith(" 0") for line in lines[1:])


def test_unit_clause_assigns():
    cs = ClauseSet(1, PRIMAL_SAT, [(1,)])
    value, status = unit_propagate(cs)
    assert status == OK and value[1] is True


def test_empty_clause_set():
    value, status = unit_propagate(ClauseSet(2, PRIMAL_SAT, []))
    assert status == OK and value == {}


def implications():
    # x1=1 implies x2, x3 and x4 all avoid value 2
    n = 4
    return [(-atom(1, 1, n), -atom(i, 2, n)) for i in (2, 3, 4)]


def test_channelling_unit_propagation_finds_conflict():
    n = 4
    for variant, expected in ((CHANNELLING_SAT, CONFLICT), (PRIMAL_SAT, OK)):
        cs = encode_direct(n, variant, implications())
        _, status = unit_propagate(cs, {atom(1, 1, n): True})
        assert status == expected


def test_forbidding_every_value_is_unsat_without_branching():
    n = 3
    cs = encode_direct(n, PRIMAL_SAT, [UnaryForbid(x(1), frozenset({1, 2, 3}))])
    res = dp_solve(cs)
    assert res.model is None and res.branches == 0


def test_two_models_for_n2():
    assert dp_solve(encode_direct(2), all_solutions=True).models == 2


def test_side_constraint_must_be_primal():
    with pytest.raises(ValueError):
        encode_direct(2, PRIMAL_SAT, [ChannelImplies(x(1), 1, d(1), 1)])


@pytest.mark.parametrize("variant", [PRIMAL_SAT, CHANNELLING_SAT])
@pytest.mark.parametrize("m", [3, 4])
def test_lockstep_langford(variant, m):
    r = lockstep_compare(langford(2, m, NEQ, symmetry=False), variant)
    assert r.equal, r.divergence
    assert r.fc_solutions == 2


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([PRIMAL_SAT, CHANNELLING_SAT]))
def test_lockstep_random(seed, variant):
    p = random_permutation_csp(5, NEQ, seed)
    r = lockstep_compare(p, variant)
    assert r.equal, r.divergence
    expected = sum(p.is_solution({x(i + 1): v for i, v in enumerate(perm)})
                   for perm in permutations(range(1, 6)))
    assert r.dp_models == expected
