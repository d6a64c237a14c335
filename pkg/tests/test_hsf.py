import itertools
import json
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bruteforce import block_relation, reduction_status
from ceerlab import hsf
from ceerlab.algebra import Relation, ReductionTable, check_reduction, check_transversal
from ceerlab.oracles import CeSetTable, make_family, pair, v_related

REDUCTIONS = Path(__file__).resolve().parent.parent / "fixtures" / "reductions"
GENUINE = sorted(p for p in REDUCTIONS.glob("*-b[12].json"))


def load(path):
    doc = json.loads(path.read_text())
    return doc, ReductionTable({x: v for x, v, _ in doc["rows"]})


def words(max_len, min_len=0):
    for n in range(min_len, max_len + 1):
        for letters in itertools.product("XY", repeat=n):
            yield "".join(letters)


def brute_period(w):
    """Least preperiod, then least period seen twice, by trying every pair."""
    for p in range(len(w)):
        for q in range(1, len(w) - p + 1):
            if 2 * q <= len(w) - p and all(w[i] == w[i - q] for i in range(p + q, len(w))):
                return p, q
    return len(w) - 1, 1


# -- tau words ------------------------------------------------------------------

def test_identity_orbit_stays_even():
    f = ReductionTable({2 * n: 2 * n for n in range(10)})
    assert hsf.tau_prefix(f, 3, 8).letters == "XXXXXXXX"


def test_orbit_into_an_odd_sink():
    f = ReductionTable({0: 1, 1: 1})
    w = hsf.tau_prefix(f, 0, 4)
    assert (w.letters, w.truncated) == ("XYYY", False)


def test_truncated_words_are_flagged():
    w = hsf.tau_prefix(ReductionTable({0: 2}), 0, 5)
    assert w.letters == "XX" and w.truncated and str(w) == "XX?"


def test_approx_classes_split_by_itinerary():
    f = ReductionTable({0: 1, 1: 1, 2: 4, 4: 8, 8: 16, 16: 32})
    # 2*0 goes odd at once; 2*1 and 2*2 stay on the even chain
    assert hsf.approx_simf_classes(f, [0, 1, 2], 3) == [[0], [1, 2]]
    ident = ReductionTable({n: n for n in range(20)})
    assert hsf.approx_simf_classes(ident, range(5), 6) == [[0, 1, 2, 3, 4]]


@pytest.mark.parametrize("path", GENUINE, ids=lambda p: p.stem)
def test_approx_classes_refine_nothing_the_fixture_relates(path):
    doc, f = load(path)
    blocks = hsf.approx_simf_classes(f, doc["sample"], doc["horizon"])
    where = {n: i for i, b in enumerate(blocks) for n in b}
    for x, y in itertools.combinations(doc["sample"], 2):
        if x // doc["x_block"] == y // doc["x_block"]:
            assert where[x] == where[y]


# -- periods --------------------------------------------------------------------

@pytest.mark.parametrize("word,expected", [("XXXXXX", (0, 1)), ("XYXYXY", (0, 2)), ("XYXXXX", (2, 1))])
def test_period_examples(word, expected):
    d = hsf.detect_period(word)
    assert (d.preperiod_len, d.period_len, d.certified_to) == (*expected, 6)


def test_empty_word_has_no_period():
    assert hsf.detect_period("") is None


def test_period_matches_brute_force_on_short_words():
    for w in words(9, 1):
        d = hsf.detect_period(w)
        assert (d.preperiod_len, d.period_len) == brute_period(w), w
        assert hsf.expand(w, d, len(w)) == w


def test_period_round_trip_at_horizon_32():
    for rho in words(4):
        for sigma in words(4, 1):
            w = (rho + sigma * 32)[:32]
            d = hsf.detect_period(w)
            assert hsf.expand(w, d, 32) == w


# -- iteration ------------------------------------------------------------------

def test_iterate_examples():
    f = ReductionTable({0: 2, 2: 6})
    assert dict(hsf.iterate(f, 2).items()) == {0: 6}
    assert dict(hsf.iterate(f, 0).items()) == {0: 0, 2: 2, 6: 6}
    assert hsf.iterate(f, 1) == f
    with pytest.raises(ValueError):
        hsf.iterate(f, -1)


tables = st.dictionaries(st.integers(0, 20), st.integers(0, 20), max_size=20)


@given(tables, st.integers(0, 5), st.integers(0, 5))
def test_iterating_an_iterate_multiplies(entries, a, b):
    f = ReductionTable(entries)
    lhs, rhs = hsf.iterate(f, a * b), hsf.iterate(hsf.iterate(f, a), b)
    for x in lhs.domain() & rhs.domain():
        assert lhs[x] == rhs[x]
    if a and b:
        assert lhs.domain() == rhs.domain()


@given(tables, st.integers(0, 5), st.integers(0, 5))
def test_iterates_compose(entries, a, b):
    f = ReductionTable(entries)
    fa, fb, fab = hsf.iterate(f, a), hsf.iterate(f, b), hsf.iterate(f, a + b)
    for x in fab.domain():
        if x in fa and fa[x] in fb:
            assert fab[x] == fb[fa[x]]


# -- the class split and the induced maps ---------------------------------------

def test_classify_examples():
    ident = ReductionTable({n: n for n in range(20)})
    assert hsf.classify_cx_cy(ident, range(5), 6).cx == {0, 2, 4, 6, 8}
    sink = ReductionTable({0: 0, 1: 1, **{2 * n: 1 for n in range(1, 6)}})
    split = hsf.classify_cx_cy(sink, range(6), 5)
    assert split.cx == {0} and split.cy == {2, 4, 6, 8, 10} and not split.undecided


@given(tables, st.sets(st.integers(0, 10), max_size=8), st.integers(1, 6))
def test_classify_partitions_the_sample(entries, sample, h):
    s = hsf.classify_cx_cy(ReductionTable(entries), sample, h)
    assert s.cx | s.cy | s.undecided == {2 * n for n in sample}
    assert not (s.cx & s.cy) and not (s.cx & s.undecided) and not (s.cy & s.undecided)
    assert s.certified_to == h


def test_g_from_cx_cases():
    f2 = ReductionTable({0: 0, 2: 3, 3: 3, 4: 8})
    split = hsf.ClassSplit(frozenset({0, 4}), frozenset({2}), frozenset({6}), 4)
    g = hsf.g_from_cx(f2, split)
    assert dict(g.table.items()) == {0: 0, 1: 1, 2: 4}
    assert g.omitted == [3]


def test_g_onto_y_two_step_branch():
    g = hsf.g_onto_y(ReductionTable({1: 2, 2: 5}))
    assert dict(g.table.items()) == {0: 2} and not g.violations


def test_g_onto_y_reports_even_even():
    g = hsf.g_onto_y(ReductionTable({1: 2, 2: 4}))
    assert g.violations == [(0, 2, 4)]
    assert hsf.g_onto_y(ReductionTable({1: 2}), [0]).omitted == [0]


@pytest.mark.parametrize("path", GENUINE, ids=lambda p: p.stem)
def test_fixtures_are_genuine_reductions(path):
    doc, f = load(path)
    z = block_relation(doc["x_block"])
    assert reduction_status(dict(f.items()), z, z, f.domain()) == "holds"


@pytest.mark.parametrize("path", GENUINE, ids=lambda p: p.stem)
def test_induced_maps_are_reductions(path):
    doc, f = load(path)
    a = hsf.analyze(f, doc["sample"], doc["horizon"])
    xb, yb = doc["x_block"], doc["y_block"]
    rx = Relation(lambda m, n: m // xb == n // xb)
    ry = Relation(lambda m, n: m // yb == n // yb)
    assert not a.split.undecided and not a.g_x.omitted and not a.g_y.omitted and not a.g_y.violations
    assert check_reduction(a.g_x.table, rx, rx, a.g_x.table.domain()).ok
    assert check_reduction(a.g_y.table, ry, ry, a.g_y.table.domain()).ok
    assert a.g_x.table.domain() == set(doc["sample"]) == a.g_y.table.domain()


def test_mixed_fixture_closed_forms():
    doc, f = load(REDUCTIONS / "mixed-b1.json")
    expected = json.loads((REDUCTIONS / "mixed-b1.expected.json").read_text())
    assert hsf.analyze(f, doc["sample"], doc["horizon"]).to_dict() == expected


# -- embedding Id into a co-c.e. relation --------------------------------------

def id_family(n):
    # V = Id on 0..n: every unequal pair enters W by stage max + 1
    return make_family("id", [], [[(pair(x, y), max(x, y) + 1)
                                   for x in range(n + 1) for y in range(n + 1) if x != y]])


def test_first_value_is_zero():
    assert hsf.id_to_coceer(CeSetTable(), 0, 5) == [0]


def test_identity_gives_the_first_numbers():
    assert hsf.id_to_coceer(id_family(20).wes[0], 3, 25) == [0, 1, 2, 3]


def test_identity_up_to_twenty():
    fam = id_family(20)
    out = hsf.id_to_coceer(fam.wes[0], 20, 25)
    assert out == list(range(21))
    assert all(not v_related(fam, 0, x, y, 25) for x, y in itertools.combinations(out, 2))
    assert check_transversal(out, Relation(lambda x, y: v_related(fam, 0, x, y, 25))).ok


def test_two_classes_stall_at_the_third_value():
    # V has classes evens and odds on 0..9
    fam = make_family("two", [], [[(pair(x, y), 1) for x in range(10) for y in range(10) if (x - y) % 2]])
    assert hsf.id_to_coceer(fam.wes[0], 2, 40) == hsf.Stalled(2)


def test_budget_too_small_stalls():
    # pair <0, 1> only enters W at stage 2
    assert hsf.id_to_coceer(id_family(5).wes[0], 3, 1) == hsf.Stalled(1)
