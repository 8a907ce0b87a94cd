from __future__ import annotations

import random
from fractions import Fraction

import pytest

from erctopo.spaces import (
    INF,
    CantorSpace,
    FivCoverIndex,
    FivInsideIndex,
    FivUnion,
    LineSpace,
    OutOfSpace,
    QhatSpace,
    StarSpace,
    UnitIntervalSpace,
    cantor_point,
    decode_interval,
    decode_rational,
    decode_rational_set,
    encode_interval,
    encode_rational,
    encode_rational_set,
    fiv_disjoint,
    fiv_member,
    fiv_subset,
    point_from_rational,
    qhat_point_name,
    qhat_point_tokens,
    star_distance,
    star_point,
    word_rank,
    word_unrank,
)

F = Fraction


# -- codecs ------------------------------------------------------------------

def test_rational_code_roundtrip():
    for q in [F(0), F(1), F(-1), F(1, 2), F(-3, 4), F(22, 7), F(-100, 9)]:
        assert decode_rational(encode_rational(q)) == q


def test_rational_decode_total():
    for n in range(2000):
        decode_rational(n)  # never raises, always canonical via Fraction


def test_interval_code_roundtrip():
    n = encode_interval(F(-1, 4), F(3, 4))
    assert decode_interval(n) == (F(-1, 4), F(3, 4))


def test_word_rank_roundtrip():
    assert [word_unrank(n) for n in range(7)] == ["", "0", "1", "00", "01", "10", "11"]
    for n in range(300):
        assert word_rank(word_unrank(n)) == n


def test_rational_set_code_roundtrip():
    s = frozenset({F(1, 2), F(-3), F(0)})
    assert decode_rational_set(encode_rational_set(s)) == s


# -- flagged interval calculus ------------------------------------------------

def _fiv_points(f, grid):
    return {x for x in grid if fiv_member(x, f)}


def _grid():
    return [F(n, 8) for n in range(-40, 41)]


def test_fiv_subset_matches_pointwise_on_grid():
    rng = random.Random(7)
    grid = _grid()
    fivs = []
    for _ in range(60):
        a, b = sorted(rng.sample(range(-12, 13), 2))
        fivs.append((F(a, 4), rng.randint(0, 1), F(b, 4), rng.randint(0, 1)))
    for x in fivs:
        for y in fivs:
            claimed = fiv_subset(x, y)
            truth = _fiv_points(x, grid) <= _fiv_points(y, grid)
            # the grid refines all endpoints, so pointwise truth is exact here
            assert claimed == truth, (x, y)


def test_fiv_disjoint_matches_pointwise_on_grid():
    rng = random.Random(11)
    grid = _grid()
    fivs = []
    for _ in range(40):
        a, b = sorted(rng.sample(range(-12, 13), 2))
        fivs.append((F(a, 4), rng.randint(0, 1), F(b, 4), rng.randint(0, 1)))
    for x in fivs:
        for y in fivs:
            assert fiv_disjoint(x, y) == (not (_fiv_points(x, grid) & _fiv_points(y, grid)))


def test_fiv_union_covers():
    u = FivUnion()
    u.add((F(0), 1, F(1), 1))
    u.add((F(1), 0, F(2), 1))  # [1,2): touches (0,1) at a closed point
    assert u.covers((F(1, 2), 0, F(3, 2), 0))
    assert not u.covers((F(0), 0, F(1), 0))  # 0 itself is not covered
    u.add((F(-1), 1, F(1, 2), 1))
    assert u.covers((F(0), 0, F(1), 0))


def test_fiv_union_open_gap_not_merged():
    u = FivUnion()
    u.add((F(0), 1, F(1), 1))
    u.add((F(1), 1, F(2), 1))
    assert not u.covers((F(1, 2), 0, F(3, 2), 0))  # 1 missing


def test_fiv_indexes_against_bruteforce():
    rng = random.Random(13)
    fivs = []
    for _ in range(120):
        a, b = sorted(rng.sample(range(-16, 17), 2))
        fivs.append((F(a, 4), rng.randint(0, 1), F(b, 4), rng.randint(0, 1)))
    cover = FivCoverIndex()
    inside = FivInsideIndex()
    seen = []
    for f in fivs:
        q = fivs[rng.randrange(len(fivs))]
        assert cover.contains(q) == any(fiv_subset(q, m) for m in seen)
        assert inside.some_inside(q) == any(fiv_subset(m, q) for m in seen)
        cover.add(f)
        inside.add(f)
        seen.append(f)


# -- interval spaces -----------------------------------------------------------

def test_line_decode_validity():
    line = LineSpace()
    n = encode_interval(F(0), F(1))
    assert line.decode(n) == (F(0), F(1))
    bad = encode_interval(F(1), F(0))
    assert line.decode(bad) is None


def test_line_point_name_soundness_and_completeness():
    line = LineSpace()
    x = point_from_rational(line, F(0))
    listing = x.neighborhoods.listing(3000)
    assert listing, "neighborhood listing must be nonempty"
    for n in listing:
        a, b = line.decode(n)
        assert a < 0 < b
    # stage bound S0 for a specific neighborhood, frozen from a recorded run
    target = encode_interval(F(-1, 2), F(1, 2))
    s0 = next(s for s in range(1, 5000) if target in x.neighborhoods.listing(s))
    assert target in x.neighborhoods.listing(s0)
    assert s0 <= target + 1


def test_unit_interval_point_name_contains_quarter_interval():
    ui = UnitIntervalSpace()
    x = point_from_rational(ui, F(1, 2))
    target = encode_interval(F(1, 4), F(3, 4))
    # derived stage bound: run the enumerator and record the first stage
    s0 = next(s for s in range(1, 20000) if target in x.neighborhoods.listing(s))
    assert s0 == 6  # recorded: the generated lane emits (1/2 - 1/4, 1/2 + 1/4) at slot 2
    assert s0 <= target + 1  # and the filter lane bounds it in any case


def test_line_point_name_never_lists_wrong_basic():
    line = LineSpace()
    x = point_from_rational(line, F(2, 3))
    wrong = encode_interval(F(0), F(1, 2))
    assert wrong not in x.neighborhoods.listing(max(3000, wrong + 10))


def test_point_out_of_space():
    ui = UnitIntervalSpace()
    with pytest.raises(OutOfSpace):
        point_from_rational(ui, F(3, 2))


def test_line_base_completeness_property():
    # every rational x and interval around it gets a sub-basic within stage 10^4
    line = LineSpace()
    rng = random.Random(5)
    for _ in range(20):
        num = rng.randint(-8, 8)
        den = rng.randint(1, 6)
        x = F(num, den)
        r = F(1, rng.randint(1, 4))
        name = point_from_rational(line, x)
        found = False
        for n in name.neighborhoods.listing(10 ** 4):
            a, b = line.decode(n)
            if x - r <= a and b <= x + r:
                found = True
                break
        assert found, (x, r)


def test_unit_interval_trace_subset():
    ui = UnitIntervalSpace()
    # (-1, 1/2) and (-2, 1/2) trace to the same set [0, 1/2)
    d1 = (F(-1), F(1, 2))
    d2 = (F(-2), F(1, 2))
    assert ui.basic_subset(d1, d2) and ui.basic_subset(d2, d1)
    assert ui.basic_subset((F(0), F(1, 2)), d1)
    assert not ui.basic_subset(d1, (F(0), F(1, 2)))  # 0 in lhs only


# -- cantor ---------------------------------------------------------------------

def test_cantor_point_name():
    c = CantorSpace()
    x = cantor_point(c, "000", "0")  # the all-zero sequence
    listing = x.neighborhoods.listing(200)
    assert word_rank("0") in listing
    assert word_rank("00") in listing
    assert word_rank("1") not in listing
    assert word_rank("01") not in listing


def test_cantor_subset_disjoint():
    c = CantorSpace()
    assert c.basic_subset("010", "01")
    assert not c.basic_subset("01", "010")
    assert c.basic_disjoint("00", "01")
    assert not c.basic_disjoint("0", "01")


def test_cantor_region_split_cover():
    c = CantorSpace()
    r = c.region()
    r.add("0")
    assert not r.covers_cdesc(("",))
    r.add("1")
    assert r.covers_cdesc(("",))


# -- star -------------------------------------------------------------------------

def test_star_distances_exact():
    assert star_distance(INF, (3, F(1, 4))) == F(3, 8)
    assert star_distance((2, F(1, 2)), (2, F(1, 4))) == F(1, 4)
    assert star_distance((1, F(1, 10)), (2, F(1, 5))) == F(21, 20)


def test_star_metric_axioms_random():
    star = StarSpace()
    rng = random.Random(42)

    def rand_point():
        if rng.random() < 0.2:
            return INF
        return (rng.randint(0, 5), F(rng.randint(0, 8), 8))

    for _ in range(500):
        p, q, r = rand_point(), rand_point(), rand_point()
        dpq = star_distance(p, q)
        assert dpq == star_distance(q, p)
        assert (dpq == 0) == (p == q)
        assert dpq <= star_distance(p, r) + star_distance(r, q)


def test_star_point_name_and_basics():
    star = StarSpace()
    x = star_point(star, INF)
    listing = x.neighborhoods.listing(500)
    assert listing
    for n in listing:
        d = star.decode(n)
        assert star.point_in_basic(INF, d)


def test_star_ball_subset_sound():
    star = StarSpace()
    d1 = ("ball", (3, F(1, 4)), F(1, 8))
    d2 = ("ball", (3, F(1, 4)), F(1, 2))
    assert star.basic_subset(d1, d2)
    assert not star.basic_subset(d2, d1)


def test_star_pinch():
    star = StarSpace()
    v = ("ball", (2, F(1, 2)), F(1, 8))
    p = ("ball", (2, F(1, 2)), F(1, 2))
    k = star.local_pinch(v, p)
    assert k == (("seg", 2, F(3, 8), F(5, 8)),)
    # no pinch around the center
    vc = ("ball", INF, F(1, 8))
    pc = ("ball", INF, F(1, 2))
    assert star.local_pinch(vc, pc) is None


# -- qhat -----------------------------------------------------------------------

def test_qhat_tokens_infinity():
    toks = qhat_point_tokens(INF)
    first = list(toks.listing(100))
    assert len(first) == 100
    vals = [t[1] for t in first]
    assert all(t[0] == "EXCLUDE" for t in first)
    assert len(set(vals)) == 100
    assert ("STOP",) not in first


def test_qhat_tokens_rational_with_exclusions():
    toks = qhat_point_tokens(F(1, 2), exclusions=3)
    ts = list(toks.listing(10))
    assert [t[0] for t in ts[:3]] == ["EXCLUDE"] * 3
    assert ts[3] == ("STOP",)
    assert all(t[0] == "INTERVAL" for t in ts[4:])
    a, b = ts[4][1], ts[4][2]
    assert a < F(1, 2) < b


def test_qhat_exclusions_never_contain_the_point():
    toks = qhat_point_tokens(F(1, 2), exclusions=50)
    ts = list(toks.listing(50))
    assert F(1, 2) not in [t[1] for t in ts]


def test_qhat_point_names():
    qhat = QhatSpace()
    inf_name = qhat_point_name(qhat, INF)
    listing = inf_name.neighborhoods.listing(400)
    assert listing
    for n in listing:
        d = qhat.decode(n)
        assert d[0] == "cof"
    half = qhat_point_name(qhat, F(1, 2), exclusions=2)
    listing = half.neighborhoods.listing(2000)
    assert any(qhat.decode(n)[0] == "iv" for n in listing)
    for n in listing:
        assert qhat.point_in_basic(F(1, 2), qhat.decode(n))


def test_qhat_subset_and_disjoint_rules():
    qhat = QhatSpace()
    iv = ("iv", F(0), F(1))
    iv2 = ("iv", F(-1), F(2))
    cof = ("cof", frozenset({F(5)}))
    cof2 = ("cof", frozenset({F(5), F(7)}))
    assert qhat.basic_subset(iv, iv2)
    assert qhat.basic_subset(iv, cof)       # 5 is outside (0, 1)
    assert not qhat.basic_subset(iv2, ("cof", frozenset({F(1, 2)})))
    assert qhat.basic_subset(cof2, cof)
    assert not qhat.basic_subset(cof, cof2)
    assert not qhat.basic_subset(cof, iv)
    assert qhat.basic_disjoint(iv, ("iv", F(2), F(3)))
    assert not qhat.basic_disjoint(iv, cof)
    assert not qhat.basic_disjoint(cof, cof2)


def test_qhat_region_covers_whole_space():
    qhat = QhatSpace()
    r = qhat.region()
    r.add(("cof", frozenset({F(0), F(1)})))
    assert not r.covers_cdesc(("all",))
    r.add(("iv", F(-1), F(2)))
    assert r.covers_cdesc(("all",))


def test_all_basics_enumerates_valid_indices_only():
    for space in (LineSpace(), UnitIntervalSpace(), CantorSpace(), StarSpace(), QhatSpace()):
        basics = space.all_basics()
        for n in basics.listing(300):
            assert space.decode(n) is not None
