import pytest
from hypothesis import given
from hypothesis import strategies as st

from bruteforce import partition_relation, reduction_status
from ceerlab.algebra import (
    FAILS, HOLDS, UNDETERMINED, Half, Join, Relation, ReductionTable, check_reduction,
    check_transversal, class_hit_report, id_k, restrict_half, uniform_join,
)
from ceerlab.kernel import Parity, StageCeer, TimePoint

partitions = st.lists(st.lists(st.integers(0, 9), min_size=2, max_size=4), max_size=3)


def test_join_keeps_sides_apart():
    r = StageCeer.from_triples([(0, 1, 1)])
    s = StageCeer.from_triples([(2, 3, 1)])
    j = uniform_join(r, s)
    assert j.related(0, 2) and j.related(5, 7)
    assert not j.related(0, 1) and not j.related(1, 3)


def test_restrict_half_unwraps_a_join():
    r, s = Relation(lambda x, y: False), Relation(lambda x, y: True)
    j = uniform_join(r, s)
    assert restrict_half(j, Parity.EVEN) is j.left
    assert restrict_half(j, Parity.ODD) is j.right


def test_restrict_half_of_a_plain_ceer_reads_codes():
    z = StageCeer.from_triples([(3, 7, 1)])
    half = restrict_half(z, Parity.ODD)
    assert isinstance(half, Half) and half.related(1, 3)
    assert not restrict_half(z, Parity.EVEN).related(1, 3)
    with pytest.raises(ValueError):
        restrict_half(z, Parity.ANY)


def test_views_follow_the_stage():
    z = StageCeer()
    z.clock.begin_stage(1)
    z.collapse([(0, 2)], "t")
    j = uniform_join(z, z)
    assert j.related(0, 4) and not j.related(0, 4, TimePoint.end_of(0))


def test_id_k():
    assert id_k(3).related(1, 7) and not id_k(3).related(1, 2)
    with pytest.raises(ValueError):
        id_k(0)


def test_reduction_table_is_write_once():
    f = ReductionTable({1: 2})
    f.define(1, 2)
    with pytest.raises(ValueError):
        f.define(1, 3)


def test_reduction_table_times_are_monotone():
    f = ReductionTable()
    f.define(0, 1, TimePoint(2))
    with pytest.raises(ValueError):
        f.define(1, 1, TimePoint(1))


def test_from_triples_and_orbit():
    f = ReductionTable.from_triples([[2, 5, 3], [1, 2, 1]])
    assert f.defined_at(1) == TimePoint(1) and f[2] == 5
    assert f.orbit(1, 5) == [1, 2, 5]
    assert f.orbit(1, 1) == [1, 2]
    assert f.domain() == {1, 2} and f.range() == {2, 5}


def test_check_reduction_verdicts():
    ident = Relation(lambda x, y: False)
    mod2 = id_k(2)
    assert check_reduction(ReductionTable({0: 0, 1: 1}), ident, ident, [0, 1]).status == HOLDS
    bad = check_reduction(ReductionTable({0: 0, 1: 2}), ident, mod2, [0, 1])
    assert bad.status == FAILS and bad.witness == (0, 1)
    part = check_reduction(ReductionTable({0: 0}), ident, ident, [0, 1])
    assert part.status == UNDETERMINED and part.witness == (1,)


def test_transversal():
    assert check_transversal([0, 1, 2], id_k(3)).ok
    v = check_transversal([0, 1, 3], id_k(3))
    assert v.failed and v.witness == (0, 3)


def test_class_hit_report():
    rel = Relation(partition_relation([[0, 4], [1, 2]]))
    rep = class_hit_report(ReductionTable({0: 2, 1: 3}), rel, 4)
    assert rep.representatives == (0, 1, 3)
    assert rep.missed == frozenset({0})
    assert rep.hits == {1: 2, 3: 3}


@given(partitions, partitions)
def test_join_restrict_roundtrip(pr, ps):
    r, s = Relation(partition_relation(pr)), Relation(partition_relation(ps))
    j = uniform_join(r, s)
    # go through a plain view so Half does the work rather than the Join shortcut
    plain = Relation(lambda x, y: j.related(x, y))
    for x in range(12):
        for y in range(12):
            assert restrict_half(plain, Parity.EVEN).related(x, y) == r.related(x, y)
            assert restrict_half(plain, Parity.ODD).related(x, y) == s.related(x, y)
            assert not j.related(2 * x, 2 * y + 1)


@given(partitions, partitions,
       st.dictionaries(st.integers(0, 9), st.integers(0, 9), max_size=8),
       st.sets(st.integers(0, 9), max_size=8))
def test_check_reduction_matches_pairwise_oracle(pr, ps, f, dom):
    r, s = partition_relation(pr), partition_relation(ps)
    v = check_reduction(ReductionTable(f), Relation(r), Relation(s), dom)
    assert v.status == reduction_status(f, r, s, dom)
    if v.failed:
        x, y = v.witness
        assert r(x, y) != s(f[x], f[y])
