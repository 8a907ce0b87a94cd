from __future__ import annotations

from fractions import Fraction

from erctopo.ercs import check_main_property, compact_neighborhood_search, interval_ercs
from erctopo.kernel import Accepted, PENDING, run_process
from erctopo.metric import (
    BoundsReal,
    ExactReal,
    LowerReal,
    UpperReal,
    ball_open,
    cl_ball_overt,
    closed_ball_closed,
    compact_ball,
    distance_to_located,
    ercs_from_compact_ball,
    exact_metric_point,
    hausdorff_distance,
    nice_radius,
    radius,
)
from erctopo.oracle import lift_finite, standard_oracle_spaces
from erctopo.sets import (
    compact_from_cdesc,
    compact_subset,
    intersect_closed_compact,
    located_from_cdesc,
    member_open,
    open_from_fixture,
    overt_from_cdesc,
    whole_open,
)
from erctopo.kernel import enumerate_function
from erctopo.spaces import (
    INF,
    LineSpace,
    PiecewiseSpace,
    StarSpace,
    UnitIntervalSpace,
    encode_interval,
    point_from_rational,
    star_point,
)

F = Fraction

_line = LineSpace()
_line_ercs = interval_ercs(_line)
_ui = UnitIntervalSpace()
_ui_ercs = interval_ercs(_ui)
_UI_WHOLE_HINT = (encode_interval(F(-1), F(2)),)


def _accepts(p, fuel=10 ** 4):
    return isinstance(run_process(p, fuel), Accepted)


def _bracket_contains(real, k, value, fuel=None):
    got = real.approx(k, fuel)
    assert got is not None, "precision request ran out of fuel"
    lo, hi = got
    assert hi - lo <= F(1, 2 ** k)
    assert lo <= value <= hi, (lo, hi, value)


# -- exact real plumbing -----------------------------------------------------------

def test_exact_real():
    assert ExactReal(F(1, 3)).approx(20) == (F(1, 3), F(1, 3))


def test_bounds_real_nested_and_converging():
    lower = LowerReal(enumerate_function(lambda t: F(1) - F(1, t + 1)))
    upper = UpperReal(enumerate_function(lambda t: F(1) + F(1, t + 1)))
    real = BoundsReal(lower, upper)
    prev = None
    for k in (2, 4, 6):
        lo, hi = real.approx(k)
        assert hi - lo <= F(1, 2 ** k)
        assert lo <= F(1) <= hi
        if prev:
            assert prev[0] <= lo and hi <= prev[1]
        prev = (lo, hi)


# -- balls in three roles ------------------------------------------------------------

def test_ball_open_contains_inner_basic():
    x = exact_metric_point(_ui.metric, F(1, 2))
    u = ball_open(_ui.metric, x, F(1, 4))
    target = encode_interval(F(3, 8), F(5, 8))
    assert target in u.parts.listing(10 ** 3)


def test_ball_open_covering_whole_interval():
    x = exact_metric_point(_ui.metric, F(1, 2))
    u = ball_open(_ui.metric, x, F(2, 3))
    for q in (F(0), F(1)):
        probe = point_from_rational(_ui, q)
        assert _accepts(member_open(probe, u))


def test_ball_open_soundness():
    x = exact_metric_point(_ui.metric, F(1, 2))
    u = ball_open(_ui.metric, x, F(1, 4))
    wrong = encode_interval(F(-1), F(1))  # trace [0, 1) around 0, radius 1
    assert wrong not in u.parts.listing(max(3000, wrong + 10))


def test_closed_ball_closed_complement_covers_outside_point():
    x = exact_metric_point(_line.metric, F(0))
    a = closed_ball_closed(_line.metric, x, F(1))
    probe = point_from_rational(_line, F(3, 2))
    assert _accepts(member_open(probe, a.complement), 10 ** 3)


def test_closed_ball_zero_radius_is_singleton():
    x = exact_metric_point(_line.metric, F(0))
    a = closed_ball_closed(_line.metric, x, F(0))
    for q in (F(1, 7), F(-2, 5), F(1)):
        probe = point_from_rational(_line, q)
        assert _accepts(member_open(probe, a.complement))


def test_cl_ball_overt_hits():
    from erctopo.sets import open_of_basic, overt_meets
    x = exact_metric_point(_ui.metric, F(1, 2))
    v = cl_ball_overt(_ui.metric, x, F(1, 4))
    near = encode_interval(F(5, 8) - F(1, 100), F(5, 8) + F(1, 100))
    assert _accepts(overt_meets(v, open_of_basic(_ui, near)))
    # soundness: everything listed truly meets the open ball
    for n in v.hits.listing(3000):
        a, b = _ui.decode(n)
        assert b > F(1, 4) and a < F(3, 4)
    far = encode_interval(F(9, 10) - F(1, 100), F(9, 10) + F(1, 100))
    v2 = cl_ball_overt(_ui.metric, x, F(1, 4))
    assert run_process(overt_meets(v2, open_of_basic(_ui, far)), 10 ** 4) is PENDING


def test_ball_ops_oracle_exact():
    fs = standard_oracle_spaces()[3]  # 3-point discrete
    space, e = lift_finite(fs)
    x = exact_metric_point(space.metric, "a")
    u = ball_open(space.metric, x, F(1, 2))
    listed = {space.decode(n) for n in u.parts.listing(10 ** 3)}
    assert listed == {frozenset({"a"})}
    a = closed_ball_closed(space.metric, x, F(1, 2))
    co = {space.decode(n) for n in a.complement.parts.listing(10 ** 3)}
    assert co == {d for d in (space.decode(i) for i in range(7)) if "a" not in d}
    v = cl_ball_overt(space.metric, x, F(1, 2))
    hits = {space.decode(n) for n in v.hits.listing(10 ** 3)}
    assert hits == {d for d in (space.decode(i) for i in range(7)) if "a" in d}


# -- compact balls ---------------------------------------------------------------------

def test_compact_ball_unit_interval():
    x = exact_metric_point(_ui.metric, F(1, 2))
    got = compact_ball(_ui_ercs, _ui.metric, x, 10 ** 4)
    assert got is not None
    n, k = got
    target = ball_open(_ui.metric, x, F(1, 2 ** n) + F(1, 100))
    assert _accepts(compact_subset(k, target))


def test_compact_ball_two_point_oracle():
    fs = standard_oracle_spaces()[1]  # two points at distance 1
    space, e = lift_finite(fs)
    x = exact_metric_point(space.metric, "a")
    got = compact_ball(e, space.metric, x, 10 ** 5)
    assert got is not None
    n, k = got
    want = frozenset({"a"}) if n >= 1 else frozenset({"a", "b"})
    for o in (frozenset({"a"}), frozenset({"a", "b"})):
        expect = want <= o
        assert _accepts(compact_subset(k, open_from_fixture(space, o)), 10 ** 5) == expect


def test_star_compact_ball_search_at_center_pending():
    star = StarSpace()
    x = star_point(star, INF)
    proc = compact_neighborhood_search(star, x, whole_open(star))
    assert run_process(proc, 10 ** 4) is PENDING


def test_star_compact_search_on_arm_accepts():
    star = StarSpace()
    x = star_point(star, (2, F(1, 2)))
    proc = compact_neighborhood_search(star, x, whole_open(star))
    assert isinstance(run_process(proc, 10 ** 4), Accepted)


# -- system from compact balls -------------------------------------------------------------

def _ui_compact_ball_provider():
    whole = compact_from_cdesc(_ui, _ui.make_cdesc([(F(0), F(1))]))

    def cb(m: int):
        center = exact_metric_point(_ui.metric, _ui.metric.dense(m))
        ball = closed_ball_closed(_ui.metric, center, F(1))
        return 0, intersect_closed_compact(ball, whole)

    return cb


def test_ercs_from_compact_ball_r_soundness():
    from erctopo.spaces import fiv_subset
    e2 = ercs_from_compact_ball(_ui.metric, _ui_compact_ball_provider())
    listed = e2.r_stream.listing(4000)
    assert listed
    for code, kid in listed:
        d = _ui.decode(code)
        assert d is not None
        patch = e2.compact_cdesc(kid)
        hull = (patch[0][0], 0, patch[-1][1], 0)
        assert fiv_subset(_ui.fiv(d), hull), (d, patch)


def test_ercs_from_compact_ball_main_property():
    e2 = ercs_from_compact_ball(_ui.metric, _ui_compact_ball_provider())
    u = open_from_fixture(_ui, (F(1, 4), F(3, 4)))
    probes = [point_from_rational(_ui, q) for q in (F(1, 2), F(3, 8), F(5, 8))]
    reports = check_main_property(e2, u, probes, 10 ** 5)
    for rep in reports:
        assert rep.closed
        a, b = _ui.decode(rep.witness.n)
        assert a < rep.probe.value < b
        patch = e2.compact_cdesc(rep.witness.kid)
        assert all(F(1, 4) < p and q < F(3, 4) for p, q in patch)


# -- radius ----------------------------------------------------------------------------------

def test_radius_line_half():
    x = exact_metric_point(_line.metric, F(0))
    cd = _line.make_cdesc([(F(-1, 2), F(1, 2))])
    k = compact_from_cdesc(_line, cd)
    v = overt_from_cdesc(_line, cd)
    _bracket_contains(radius(_line.metric, x, k, v), 10, F(1, 2))


def test_radius_unit_interval_whole():
    x = exact_metric_point(_ui.metric, F(1, 2))
    cd = _ui.make_cdesc([(F(0), F(1))])
    k = compact_from_cdesc(_ui, cd)
    v = overt_from_cdesc(_ui, cd)
    _bracket_contains(radius(_ui.metric, x, k, v), 10, F(1, 2))


def test_radius_oracle_singleton_zero():
    fs = standard_oracle_spaces()[1]
    space, e = lift_finite(fs)
    x = exact_metric_point(space.metric, "a")
    cd = frozenset({"a"})
    k = compact_from_cdesc(space, cd)
    v = overt_from_cdesc(space, cd)
    _bracket_contains(radius(space.metric, x, k, v), 10, F(0))


# -- nice radius -----------------------------------------------------------------------------

def test_nice_radius_gap_space_avoids_one():
    space = PiecewiseSpace([(F(0), F(0)), (F(1), F(2))], name="gap")
    x = exact_metric_point(space.metric, F(0))
    k = compact_from_cdesc(space, space.make_cdesc([(F(-3, 2), F(3, 2))]))
    real = nice_radius(space.metric, x, F(3, 2), k)
    got = real.approx(10)
    assert got is not None
    lo, hi = got
    assert 0 < lo <= hi < F(3, 2)
    assert hi < 1 or lo > 1  # the degenerate radius is excluded
    # decision oracle: in this space the only radius in (0, 3/2) with
    # cl B(0, d) != closed-ball(0, d) is d = 1
    assert all(d != 1 for d in (lo, hi))


def test_nice_radius_unit_interval_any():
    x = exact_metric_point(_ui.metric, F(0))
    k = compact_from_cdesc(_ui, _ui.make_cdesc([(F(-1, 2), F(1, 2))]))
    real = nice_radius(_ui.metric, x, F(1, 2), k)
    got = real.approx(8)
    assert got is not None
    lo, hi = got
    assert 0 < lo <= hi < F(1, 2)


def test_nice_radius_oracle_property():
    fs = standard_oracle_spaces()[1]  # two points at distance 1
    space, e = lift_finite(fs)
    x = exact_metric_point(space.metric, "a")
    k = compact_from_cdesc(space, frozenset({"a", "b"}))
    real = nice_radius(space.metric, x, F(3, 2), k)
    got = real.approx(8)
    assert got is not None
    lo, hi = got
    assert 0 < lo <= hi < F(3, 2)
    assert hi < 1 or lo > 1
    # exhaustive check: closure of the open ball equals the closed ball for
    # every radius in the bracket (both differ only at radius exactly 1)
    for d in (lo, hi):
        open_ball = {p for p in fs.points if fs.distance("a", p) < d}
        closed_ball = {p for p in fs.points if fs.distance("a", p) <= d}
        assert (open_ball == closed_ball) == (d != 1)
        assert d != 1


# -- distance to located sets ---------------------------------------------------------------

def test_distance_line_unit_gap():
    x = exact_metric_point(_line.metric, F(0))
    a = located_from_cdesc(_line, _line.make_cdesc([(F(1), F(2))]))
    real = distance_to_located(_line.metric, _line_ercs, x, a)
    _bracket_contains(real, 10, F(1))


def test_distance_membership_zero():
    x = exact_metric_point(_line.metric, F(3, 2))
    a = located_from_cdesc(_line, _line.make_cdesc([(F(1), F(2))]))
    real = distance_to_located(_line.metric, _line_ercs, x, a)
    _bracket_contains(real, 10, F(0))


def test_distance_oracle_exhaustive():
    from erctopo.oracle import brute_distance
    fs = standard_oracle_spaces()[4]  # scalene 3-point metric
    space, e = lift_finite(fs)
    for x in fs.points:
        xp = exact_metric_point(space.metric, x)
        for a in space_subsets(fs):
            if not a:
                continue
            located = located_from_cdesc(space, a)
            real = distance_to_located(space.metric, e, xp, located, hi_seed=F(2))
            _bracket_contains(real, 10, brute_distance(fs, x, a))


def space_subsets(fs):
    from itertools import combinations
    return [frozenset(c) for k in range(len(fs.points) + 1)
            for c in combinations(fs.points, k)]


# -- Hausdorff distance ------------------------------------------------------------------------

def test_hausdorff_half():
    a = located_from_cdesc(_ui, _ui.make_cdesc([(F(0), F(1, 2))]))
    b = located_from_cdesc(_ui, _ui.make_cdesc([(F(1, 2), F(1))]))
    real = hausdorff_distance(_ui.metric, _ui_ercs, a, b, _UI_WHOLE_HINT)
    _bracket_contains(real, 10, F(1, 2))


def test_hausdorff_identity_zero():
    a = located_from_cdesc(_ui, _ui.make_cdesc([(F(0), F(1))]))
    b = located_from_cdesc(_ui, _ui.make_cdesc([(F(0), F(1))]))
    real = hausdorff_distance(_ui.metric, _ui_ercs, a, b, _UI_WHOLE_HINT)
    _bracket_contains(real, 10, F(0))


def test_hausdorff_two_singletons():
    a = located_from_cdesc(_ui, _ui.make_cdesc([(F(0), F(0))]))
    b = located_from_cdesc(_ui, _ui.make_cdesc([(F(1), F(1))]))
    real = hausdorff_distance(_ui.metric, _ui_ercs, a, b, _UI_WHOLE_HINT, hi_seed=F(2))
    _bracket_contains(real, 10, F(1))


def test_hausdorff_symmetry_exact():
    import random
    rng = random.Random(23)
    for _ in range(10):
        p1 = sorted(F(rng.randint(0, 8), 8) for _ in range(2))
        p2 = sorted(F(rng.randint(0, 8), 8) for _ in range(2))
        a = located_from_cdesc(_ui, _ui.make_cdesc([tuple(p1)]))
        b = located_from_cdesc(_ui, _ui.make_cdesc([tuple(p2)]))
        d1 = hausdorff_distance(_ui.metric, _ui_ercs, a, b, _UI_WHOLE_HINT).approx(8)
        a2 = located_from_cdesc(_ui, _ui.make_cdesc([tuple(p1)]))
        b2 = located_from_cdesc(_ui, _ui.make_cdesc([tuple(p2)]))
        d2 = hausdorff_distance(_ui.metric, _ui_ercs, b2, a2, _UI_WHOLE_HINT).approx(8)
        assert d1 is not None and d2 is not None
        # symmetric up to bracket overlap around the common true value
        assert max(d1[0], d2[0]) <= min(d1[1], d2[1])
