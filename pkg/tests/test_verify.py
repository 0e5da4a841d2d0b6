from permuta.verify import dominance, fixpoint_sweep, lockstep_suite


def test_fixpoint_sweep_small():
    report = fixpoint_sweep(60, seed=1)
    assert report.checked == 60 * (3 + 5 + 3)
    assert report.ok, report.mismatches[:3]


def test_dominance_langford_2_4():
    report = dominance("langford:2,4")
    fails = [r.fails for r in report.chain]
    assert fails == sorted(fails)
    assert report.classes_equal
    assert {r.solutions for r in report.chain} == {2}


def test_lockstep_suite_small():
    results = lockstep_suite(seeds=5)
    assert len(results) == (2 + 5) * 2
    assert all(r.equal for _, r in results)
