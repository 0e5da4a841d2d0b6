import random

import pytest
from hypothesis import given, settings, strategies as st

from permuta.core import (
    ALLDIFF, C, NEQ, NEQ_C, NEQ_C_NEQ, AllDifferent, BinaryTable, Domain, NotEquals, x,
)
from permuta.lab import (
    BinaryNetwork, Inconsistent, Level, brute_force_gac, check_level, enforce_ac,
    enforce_pc, permutation_network,
)
from permuta.lab.fixtures import load_fixtures, parse_fixtures, replay_fixtures
from permuta.lab.lattice import (
    EXHAUSTIVE, Sample, lattice_arrows, verify_lattice,
)

MODELS = [NEQ, C, NEQ_C, NEQ_C_NEQ, ALLDIFF]


def doms(*sets):
    return [Domain(s) for s in sets]


def test_rpc_separates_neq_and_c():
    p = doms({1, 2, 3}, {1, 2, 3}, {1, 2, 3}, {1, 2, 3, 4})
    assert check_level(permutation_network(NEQ, p), Level.RPC)
    assert not check_level(permutation_network(C, p), Level.RPC)


def test_sac_separates_neq_and_c():
    p = doms({0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {3, 4})
    assert check_level(permutation_network(NEQ, p), Level.SAC)
    assert not check_level(permutation_network(C, p), Level.SAC)


def test_acpc_separates_neq_and_c():
    p = doms({1, 2, 3}, {1, 2, 3}, {1, 2, 3}, {1, 2, 3})
    assert check_level(permutation_network(NEQ, p), Level.ACPC)
    assert not check_level(permutation_network(C, p), Level.ACPC)


def test_gac_strictly_above_ac_c():
    p = doms({1, 2}, {1, 2}, {1, 2}, {3, 4, 5}, {3, 4, 5})
    assert check_level(permutation_network(C, p), Level.AC)
    assert not check_level(permutation_network(ALLDIFF, p), Level.GAC)


def test_pc_tightens_even_sum():
    even = frozenset((a, b) for a in range(1, 4) for b in range(1, 4) if (a + b) % 2 == 0)
    cons = [NotEquals(x(1), x(2)), NotEquals(x(1), x(3)), NotEquals(x(2), x(3)),
            BinaryTable(x(1), x(3), even)]
    full = {x(i): Domain({1, 2, 3}) for i in (1, 2, 3)}
    net = BinaryNetwork.from_constraints(full, cons + [AllDifferent((x(1), x(2), x(3)))])
    gac = brute_force_gac([x(1), x(2), x(3)],
                          lambda a: len(set(a.values())) == 3 and (a[x(1)] + a[x(3)]) % 2 == 0,
                          full)
    assert gac == {x(1): Domain({1, 3}), x(2): Domain({2}), x(3): Domain({1, 3})}
    net = net.with_domains([gac[v].mask for v in net.vars])
    out = enforce_pc(net)
    assert out.relation(x(1), x(3)) == {(1, 3), (3, 1)}


def test_pc_leaves_fixpoint_unchanged():
    net = BinaryNetwork.from_constraints({x(1): Domain({1, 2}), x(2): Domain({1, 2})},
                                         [NotEquals(x(1), x(2))])
    out = enforce_pc(net)
    assert out.dom == net.dom
    assert out.relation(x(1), x(2)) == {(1, 2), (2, 1)}
    assert enforce_pc(out).rel == out.rel


def test_pc_raises_on_wipeout():
    net = BinaryNetwork.from_constraints({x(1): Domain({1}), x(2): Domain({1})},
                                         [NotEquals(x(1), x(2))])
    with pytest.raises(Inconsistent):
        enforce_pc(net)


def test_brute_force_gac_examples():
    alldiff = lambda a: len(set(a.values())) == len(a)
    scope = [x(1), x(2), x(3)]
    out = brute_force_gac(scope, alldiff, dict(zip(scope, doms({1, 2}, {1, 2}, {1, 2, 3}))))
    assert out[x(3)] == {3}
    same = dict(zip(scope, doms({1}, {2}, {3})))
    assert brute_force_gac(scope, alldiff, same) == same
    out = brute_force_gac(scope, alldiff, dict(zip(scope, doms({1, 2}, {1, 2}, {1, 2}))))
    assert all(not dom for dom in out.values())


def random_primal(rng, n):
    out = []
    for _ in range(n):
        out.append(Domain(v for v in range(1, n + 1) if rng.random() < 0.6) or Domain({1}))
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10 ** 6), st.sampled_from(MODELS))
def test_relations_symmetric(n, seed, spec):
    net = permutation_network(spec, random_primal(random.Random(seed), n))
    assert net.is_symmetric()
    for (p, q), table in net.rel.items():
        for a, bits in table.items():
            for b in range(n + 2):
                assert (bits >> b & 1) == (net.rel[(q, p)].get(b, 0) >> a & 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10 ** 6), st.sampled_from(MODELS[:4]))
def test_ac_check_agrees_with_enforcement(n, seed, spec):
    net = permutation_network(spec, random_primal(random.Random(seed), n))
    closed = net.copy()
    ok = enforce_ac(closed)
    assert check_level(net, Level.AC) == (ok and closed.dom == net.dom)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10 ** 6))
def test_gac_check_agrees_with_brute_force(n, seed):
    primal = random_primal(random.Random(seed), n)
    net = permutation_network(ALLDIFF, primal)
    scope = [x(i) for i in range(1, n + 1)]
    store = dict(zip(scope, primal))
    out = brute_force_gac(scope, lambda a: len(set(a.values())) == n, store)
    assert check_level(net, Level.GAC) == (out == store)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10 ** 6), st.sampled_from(MODELS[:4]))
def test_levels_imply_ac(n, seed, spec):
    net = permutation_network(spec, random_primal(random.Random(seed), n))
    ac = check_level(net, Level.AC)
    for level in (Level.RPC, Level.PIC, Level.SAC, Level.ACPC):
        if check_level(net, level):
            assert ac
    if check_level(net, Level.PIC):
        assert check_level(net, Level.RPC)


def test_fixture_file_parses():
    fixtures = load_fixtures()
    assert len(fixtures) >= 20
    names = [fx.name for fx in fixtures]
    assert len(set(names)) == len(names)


def test_fixture_parse_errors():
    with pytest.raises(ValueError):
        parse_fixtures("dom x1 1\n")
    with pytest.raises(ValueError):
        parse_fixtures("[a]\nexpect AC c maybe\n")


def test_fixture_replay_covers_every_expectation():
    results = replay_fixtures()
    total = sum(len(fx.expect) for fx in load_fixtures())
    assert len(results) == total


def test_lattice_arrow_catalogue():
    arrows = lattice_arrows()
    text = {str(a) for a in arrows}
    assert "GAC_∀ -> AC_≠c≠" in text
    assert "AC_c -> AC_≠" in text
    assert "ACPC_≠ x AC_c" in text
    assert len(text) == len(arrows)


def test_lattice_n3_counts_and_witnesses():
    report = verify_lattice(3)
    assert report.configs == 343
    violated = [r for r in report.results if r.violations]
    for r in violated:
        # every violation carries a reproducible witness
        masks = r.forward.masks
        strong, weak = r.arrow.stronger, r.arrow.weaker
        primal = [Domain.from_mask(mk) for mk in masks]
        assert check_level(permutation_network(strong[1], primal), strong[0])
        assert not check_level(permutation_network(weak[1], primal), weak[0])
    # the one arrow that fails under these definitions, frozen from an exhaustive run
    assert {str(r.arrow): r.violations for r in violated} == {"BC_∀ -> BC_≠c≠": 9}


def test_bc_alldiff_counterexample():
    primal = doms({2}, {1, 3}, {1, 2, 3})
    assert check_level(permutation_network(ALLDIFF, primal), Level.BC)
    assert not check_level(permutation_network(NEQ_C_NEQ, primal), Level.BC)


def test_lattice_ac_row_n4():
    report = verify_lattice(4, levels=[Level.AC, Level.GAC], mode=EXHAUSTIVE)
    assert report.configs == 50625
    assert report.violations == 0


def test_lattice_sample_is_seeded():
    a = verify_lattice(3, levels=[Level.AC], mode=Sample(50, 7))
    b = verify_lattice(3, levels=[Level.AC], mode=Sample(50, 7))
    assert a.to_csv() == b.to_csv()


def test_lattice_rejects_large_exhaustive():
    with pytest.raises(ValueError):
        verify_lattice(5)
    with pytest.raises(ValueError):
        verify_lattice(6, mode=Sample(10, 0))
