import pytest
from hypothesis import given, settings, strategies as st

from permuta.core import C2, C3, INJECTION_TAGS, NEQ, PERMUTATION_TAGS, C, build_injection_model, build_permutation_model
from permuta.problems import golomb, langford, magic, quasigroup, random_permutation_csp, sport
from permuta.serialize import dumps, loads

BUILDERS = [
    lambda: langford(2, 4, C),
    lambda: golomb(5, 11, C2),
    lambda: golomb(5, 11, NEQ),
    lambda: quasigroup("qg3", 4, C),
    lambda: sport(6, C),
    lambda: sport(5, C3),
    lambda: magic(3, C),
    lambda: random_permutation_csp(5, C, 3),
]


@pytest.mark.parametrize("build", BUILDERS)
def test_roundtrip_benchmarks(build):
    p = build()
    text = dumps(p)
    q = loads(text)
    assert q == p
    assert dumps(q) == text


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.sampled_from(PERMUTATION_TAGS))
def test_roundtrip_permutation_models(n, spec):
    p = build_permutation_model(n, spec)
    assert loads(dumps(p)) == p


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3), st.sampled_from(INJECTION_TAGS))
def test_roundtrip_injection_models(n, extra, spec):
    p = build_injection_model(n, n + extra, spec)
    assert loads(dumps(p)) == p


def test_rejects_unknown_directive():
    with pytest.raises(ValueError):
        loads("vars 1 1\nfrobnicate\n")
    with pytest.raises(ValueError):
        loads("dom x1 1\n")
