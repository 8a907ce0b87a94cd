"""Metric-space algorithms: balls in all three set roles, compact closed
balls, systems built from them, radii, located-set distances and the
Hausdorff distance.

Exact reals are nested rational brackets.  A bracket owes its bounds to
semidecision certificates: an upper bound comes from a covering that was
seen to succeed, a lower bound from an overlap or avoidance witness.  A
request for precision k drives the underlying machines until the bracket
closes to width 2**-k or the fuel budget runs out (an ordinary Pending).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .ercs import Ercs, compact_base
from .kernel import (
    Machine,
    MonotoneEnumerator,
    SemidecisionProcess,
    enumerate_step,
    pair,
    unpair,
)
from .sets import (
    ClosedSet,
    CompactSet,
    LocatedSet,
    OpenSet,
    OvertSet,
    closed_from_cdesc,
    compact_subset,
    intersect_closed_compact,
    open_from_fixture,
    overt_meets,
    whole_open,
)
from .spaces import (
    MetricStructure,
    OutOfSpace,
    PointName,
    Space,
    emission_slot,
    encode_interval,
)

DEFAULT_APPROX_FUEL = 2 * 10 ** 5


# ---------------------------------------------------------------------------
# Exact reals

class CReal:
    """A real as nested rational brackets of width at most 2**-k."""

    def approx(self, k: int, fuel: int | None = None):
        """Bracket (lo, hi) with hi - lo <= 2**-k, or None on fuel exhaustion."""
        raise NotImplementedError


class ExactReal(CReal):
    def __init__(self, value):
        self.value = Fraction(value)

    def approx(self, k: int, fuel: int | None = None):
        return (self.value, self.value)


class LowerReal:
    """Nondecreasing rational bounds from below."""

    def __init__(self, bounds: MonotoneEnumerator[Fraction]):
        self.bounds = bounds

    def best(self, stage: int) -> Fraction | None:
        listed = self.bounds.listing(stage)
        return max(listed) if listed else None


class UpperReal:
    """Nonincreasing rational bounds from above."""

    def __init__(self, bounds: MonotoneEnumerator[Fraction]):
        self.bounds = bounds

    def best(self, stage: int) -> Fraction | None:
        listed = self.bounds.listing(stage)
        return min(listed) if listed else None


class BoundsReal(CReal):
    """Interleaves a lower and an upper bound stream into nested brackets."""

    def __init__(self, lower: LowerReal, upper: UpperReal):
        self.lower = lower
        self.upper = upper
        self._best: dict[int, tuple[Fraction, Fraction]] = {}

    def approx(self, k: int, fuel: int | None = None):
        if k in self._best:
            return self._best[k]
        budget = DEFAULT_APPROX_FUEL if fuel is None else fuel
        width = Fraction(1, 2 ** k)
        stage = 1
        while stage <= budget:
            lo = self.lower.best(stage)
            hi = self.upper.best(stage)
            if lo is not None and hi is not None and hi - lo <= width:
                self._best[k] = (lo, hi)
                return (lo, hi)
            stage = min(2 * stage, budget) if stage < budget else budget + 1
        return None


class _BracketMachine(Machine):
    """Shrinks a rational bracket by racing certificate processes.

    ``upper_factory(r)`` accepts only if the value is < r (then hi := r);
    ``lower_factory(r)`` accepts only if the value is >= r (then lo := r).
    Probes are placed at thirds so the unknown value can coincide with at
    most one probe; the other must eventually resolve.  If certificates
    ever cross (an upper certificate below a lower one) the bracket is
    frozen at the crossing gap -- any value inside is then valid.
    """

    def __init__(self, lo: Fraction,
                 upper_factory: Callable[[Fraction], SemidecisionProcess],
                 lower_factory: Callable[[Fraction], SemidecisionProcess],
                 hi_seed: Fraction = Fraction(1)):
        super().__init__()
        self.lo = Fraction(lo)
        self.hi: Fraction | None = None
        self.frozen: Fraction | None = None
        self._upper_factory = upper_factory
        self._lower_factory = lower_factory
        self._seed = Fraction(hi_seed)
        self._probes: list[tuple[str, Fraction, SemidecisionProcess, int]] = []
        self._sweep_r = self._seed
        self._sweep_proc = upper_factory(self._seed)
        self._sweep_fuel = 0
        self._cursor = 0

    def width(self) -> Fraction | None:
        if self.frozen is not None:
            return Fraction(0)
        if self.hi is None:
            return None
        return self.hi - self.lo

    def value_bracket(self) -> tuple[Fraction, Fraction] | None:
        if self.frozen is not None:
            return (self.frozen, self.frozen)
        if self.hi is None:
            return None
        return (self.lo, self.hi)

    def _place_probes(self) -> None:
        w = self.hi - self.lo
        if w <= 0:
            self._probes = []
            return
        r1 = self.lo + w / 3
        r2 = self.lo + 2 * w / 3
        self._probes = [
            ("hi", r1, self._upper_factory(r1), 0),
            ("lo", r1, self._lower_factory(r1), 0),
            ("hi", r2, self._upper_factory(r2), 0),
            ("lo", r2, self._lower_factory(r2), 0),
        ]

    def step(self, t: int) -> bool:
        if self.frozen is not None:
            return False
        if self.hi is None:
            # initial sweep for any upper bound at all
            self._sweep_fuel += 1
            if self._sweep_proc.poll(self._sweep_fuel) is not None:
                self.hi = self._sweep_r
                self._place_probes()
            elif self._sweep_fuel >= 4 * (t.bit_length() + 1) ** 2:
                self._sweep_r = self._sweep_r * 2
                self._sweep_proc = self._upper_factory(self._sweep_r)
                self._sweep_fuel = 0
            return False
        if not self._probes:
            return False
        self._cursor %= len(self._probes)
        kind, r, proc, f = self._probes[self._cursor]
        f += 1
        if proc.poll(f) is not None:
            if kind == "hi":
                if r < self.lo:
                    self.frozen = (r + self.lo) / 2
                    return False
                self.hi = min(self.hi, r)
            else:
                if r > self.hi:
                    self.frozen = (self.hi + r) / 2
                    return False
                self.lo = max(self.lo, r)
            self._place_probes()
            self._cursor = 0
        else:
            self._probes[self._cursor] = (kind, r, proc, f)
            self._cursor += 1
        return False


class BracketReal(CReal):
    def __init__(self, machine: _BracketMachine):
        self.machine = machine
        self._best: dict[int, tuple[Fraction, Fraction]] = {}
        self._stage = 0

    def approx(self, k: int, fuel: int | None = None):
        if k in self._best:
            return self._best[k]
        budget = DEFAULT_APPROX_FUEL if fuel is None else fuel
        width = Fraction(1, 2 ** k)
        while True:
            w = self.machine.width()
            if w is not None and w <= width:
                self._best[k] = self.machine.value_bracket()
                return self._best[k]
            if self._stage >= budget:
                return None
            self._stage += 1
            self.machine.poll(self._stage)


# ---------------------------------------------------------------------------
# Metric points

class MetricPoint:
    """A point with a fast Cauchy representative among the dense sequence.

    ``name`` is the point's neighborhood name in the ambient space; exact
    fixture points carry their rational (or structured) value.
    """

    def __init__(self, metric: MetricStructure, cauchy: Callable[[int], int],
                 name: PointName, value=None):
        self.metric = metric
        self.space = metric.space
        self.cauchy = cauchy
        self.name = name
        self.value = value


def exact_metric_point(metric: MetricStructure, value) -> MetricPoint:
    """Fixture point taken from the dense sequence itself."""
    from .oracle import OracleSpace, oracle_point
    from .spaces import (PiecewiseSpace, StarSpace, _IntervalSpaceBase,
                         point_from_rational, star_point)

    space = metric.space
    idx = metric.dense_index(value)
    if isinstance(space, (_IntervalSpaceBase, PiecewiseSpace)):
        name = point_from_rational(space, value)
    elif isinstance(space, StarSpace):
        name = star_point(space, value)
    elif isinstance(space, OracleSpace):
        name = oracle_point(space, value)
    else:
        raise OutOfSpace(f"no exact points for {space.name}")
    return MetricPoint(metric, lambda k: idx, name, value=value)


def _point_distance(m: MetricStructure, xval, yval) -> Fraction:
    return m.exact(xval, yval)


# ---------------------------------------------------------------------------
# Exact ball description tests (per space family)

def _interval_like(space: Space) -> bool:
    from .spaces import _IntervalSpaceBase
    return isinstance(space, _IntervalSpaceBase)


def _piecewise(space: Space) -> bool:
    from .spaces import PiecewiseSpace
    return isinstance(space, PiecewiseSpace)


def _oracle_like(space: Space) -> bool:
    from .oracle import OracleSpace
    return isinstance(space, OracleSpace)


def _basic_in_open_ball(m: MetricStructure, xval, desc, r: Fraction) -> bool:
    """Sound and, on fixtures, exact: basic included in B(x, r)."""
    space = m.space
    if _piecewise(space):
        from .spaces import fiv_subset
        ball = (xval - r, 1, xval + r, 1)
        return all(fiv_subset(f, ball) for f in space.trace(desc))
    if _interval_like(space):
        f = space.fiv(desc)
        return xval - r <= f[0] and f[2] <= xval + r
    if _oracle_like(space):
        return all(m.exact(xval, p) < r for p in desc)
    from .spaces import StarSpace
    if isinstance(space, StarSpace):
        _, c, q = desc
        return m.exact(xval, c) + q <= r
    return False


def _basic_outside_closed_ball(m: MetricStructure, xval, desc, r: Fraction) -> bool:
    space = m.space
    if _piecewise(space):
        from .spaces import fiv_disjoint
        ball = (xval - r, 0, xval + r, 0)
        return all(fiv_disjoint(f, ball) for f in space.trace(desc))
    if _interval_like(space):
        f = space.fiv(desc)
        return f[2] <= xval - r or xval + r <= f[0]
    if _oracle_like(space):
        return all(m.exact(xval, p) > r for p in desc)
    from .spaces import StarSpace
    if isinstance(space, StarSpace):
        _, c, q = desc
        return m.exact(xval, c) - q >= r
    return False


def _basic_meets_open_ball(m: MetricStructure, xval, desc, r: Fraction) -> bool:
    space = m.space
    if _piecewise(space):
        from .spaces import fiv_disjoint
        ball = (xval - r, 1, xval + r, 1)
        return any(not fiv_disjoint(f, ball) for f in space.trace(desc))
    if _interval_like(space):
        f = space.fiv(desc)
        lo_gap = f[0] - xval
        hi_gap = xval - f[2]
        return max(lo_gap, hi_gap, Fraction(0)) < r
    if _oracle_like(space):
        return any(m.exact(xval, p) < r for p in desc)
    return False


def _basic_min_dist(m: MetricStructure, xval, desc) -> Fraction:
    """Infimum distance from x to the (nonempty) basic; exact on fixtures."""
    space = m.space
    if _piecewise(space):
        best = None
        for lo, _, hi, _ in space.trace(desc):
            d = max(lo - xval, xval - hi, Fraction(0))
            best = d if best is None else min(best, d)
        return best
    if _interval_like(space):
        f = space.fiv(desc)
        return max(f[0] - xval, xval - f[2], Fraction(0))
    if _oracle_like(space):
        return min(m.exact(xval, p) for p in desc)
    raise OutOfSpace(f"no exact infimum distance on {space.name}")


def _ball_desc(m: MetricStructure, xval, r: Fraction, closed: bool):
    """Exact description of the (closed) ball, when the space supports one."""
    space = m.space
    if _interval_like(space) or _piecewise(space):
        return space.make_cdesc([(xval - r, xval + r)]) if closed else (xval - r, xval + r)
    if _oracle_like(space):
        pts = [p for p in space.fs.points
               if (m.exact(xval, p) <= r if closed else m.exact(xval, p) < r)]
        return frozenset(pts)
    return None


# ---------------------------------------------------------------------------
# Balls in their three roles

def ball_open(m: MetricStructure, x: MetricPoint, r) -> OpenSet:
    """Open ball as an open set: generated shrinking cores plus the filter
    of every basic certified inside."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("ball radius must be positive")
    space = m.space
    if x.value is not None and (_interval_like(space) or _piecewise(space)):
        xv = x.value

        def step(t: int):
            out = []
            s = emission_slot(t)
            if s is not None:
                rho = r - r / 2 ** (s + 1)
                c = encode_interval(xv - rho, xv + rho)
                if space.decode(c) is not None:
                    out.append(c)
            d = space.decode(t)
            if d is not None and _basic_in_open_ball(m, xv, d, r):
                out.append(t)
            return out

        return OpenSet(space, enumerate_step(step), label=f"ball:{r}")
    if x.value is not None and _oracle_like(space):
        ball = _ball_desc(m, x.value, r, closed=False)
        return open_from_fixture(space, ball)
    from .spaces import StarSpace
    if x.value is not None and isinstance(space, StarSpace):
        def step(t: int):
            out = []
            s = emission_slot(t)
            if s is not None:
                eps = Fraction(1, 2 ** (s + 1))
                if eps < r:
                    out.append(space.encode_ball(x.value, r - eps))
            d = space.decode(t)
            if d is not None and _basic_in_open_ball(m, x.value, d, r):
                out.append(t)
            return out

        return OpenSet(space, enumerate_step(step), label=f"ball:{r}")

    def generic_step(t: int):
        out = []
        s = emission_slot(t)
        if s is not None:
            rho = r - 2 * Fraction(1, 2 ** s)
            if rho > 0:
                center = m.dense(x.cauchy(s))
                out.append(_encode_metric_ball(space, m, center, rho))
        return [c for c in out if c is not None and space.decode(c) is not None]

    return OpenSet(space, enumerate_step(generic_step), label=f"ball:{r}")


def _encode_metric_ball(space: Space, m: MetricStructure, center, rho: Fraction):
    if _interval_like(space) or _piecewise(space):
        return encode_interval(center - rho, center + rho)
    from .spaces import StarSpace
    if isinstance(space, StarSpace):
        return space.encode_ball(center, rho)
    if _oracle_like(space):
        ball = frozenset(p for p in space.fs.points if m.exact(center, p) < rho)
        for n in range(space.finite_basic_count):
            if space.decode(n) == ball:
                return n
    return None


def closed_ball_closed(m: MetricStructure, x: MetricPoint, r) -> ClosedSet:
    """Closed ball as a closed set: the complement enumerates every basic
    certified to avoid it."""
    r = Fraction(r)
    space = m.space
    cdesc = _ball_desc(m, x.value, r, closed=True) if x.value is not None else None
    if cdesc is not None:
        return closed_from_cdesc(space, cdesc)

    def step(t: int):
        out = []
        n, k = unpair(t)
        d = space.decode(n)
        if d is not None and x.value is not None:
            if _basic_outside_closed_ball(m, x.value, d, r):
                out.append(n)
        return out

    return ClosedSet(OpenSet(space, enumerate_step(step), label=f"co-ball:{r}"),
                     cdesc=None)


def cl_ball_overt(m: MetricStructure, x: MetricPoint, r) -> OvertSet:
    """Closure of the open ball as an overt set: every basic meeting the
    open ball, certified through a common witness."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("ball radius must be positive")
    space = m.space
    if x.value is None:
        raise OutOfSpace("overt balls need an exact fixture center")

    def ball_seeds():
        if _interval_like(space) or _piecewise(space):
            for s in range(13):
                grid = 2 ** s
                rho = r / (2 * grid)
                for j in range(-grid, grid + 1):
                    anchor = x.value + j * r / grid
                    yield encode_interval(anchor - rho, anchor + rho)
            # fine refinements at the ball boundary, where escape witnesses live
            for s in range(13, 49):
                rho = r / 2 ** s
                for anchor in (x.value - r, x.value, x.value + r):
                    yield encode_interval(anchor - rho, anchor + rho)
        else:
            for s in range(13):
                c = _encode_metric_ball(space, m, x.value, Fraction(1, 2 ** s))
                if c is not None:
                    yield c

    seeds = ball_seeds()

    def step(t: int):
        out = []
        c = next(seeds, None)
        if c is not None:
            d = space.decode(c)
            if d is not None and _basic_meets_open_ball(m, x.value, d, r):
                out.append(c)
        d = space.decode(t)
        if d is not None and _basic_meets_open_ball(m, x.value, d, r):
            out.append(t)
        return out

    return OvertSet(space, enumerate_step(step, stall_after=space.finite_basic_count),
                    cdesc=None)


# ---------------------------------------------------------------------------
# Compact balls

def compact_ball(e: Ercs, m: MetricStructure, x: MetricPoint,
                 fuel: int) -> tuple[int, CompactSet] | None:
    """Some n with a compact name of the closed ball of radius 2**-n.

    Runs the compact-base search in the whole space, shrinks a dyadic ball
    into the found neighborhood, and prunes the patch to the closed ball.
    """
    got = compact_base(e, x.name, whole_open(m.space), fuel)
    if got is None:
        return None
    v, patch = got
    vdesc = m.space.decode(v.parts.listing(2)[0])
    n = 0
    while n < 64:
        rho = Fraction(1, 2 ** n)
        if x.value is not None and _ball_inside_basic(m, x.value, rho, vdesc):
            break
        n += 1
    else:
        return None
    # the closed ball of half that radius sits inside the open one, hence
    # inside the patch, so pruning the patch yields exactly the closed ball
    n += 1
    ball = closed_ball_closed(m, x, Fraction(1, 2 ** n))
    return n, intersect_closed_compact(ball, patch)


def _ball_inside_basic(m: MetricStructure, xval, rho: Fraction, desc) -> bool:
    space = m.space
    if _interval_like(space) or _piecewise(space):
        return space.basic_subset((xval - rho, xval + rho), desc)
    if _oracle_like(space):
        ball = frozenset(p for p in space.fs.points if m.exact(xval, p) < rho)
        return ball <= desc
    return False


def ercs_from_compact_ball(m: MetricStructure,
                           cb: Callable[[int], tuple[int, CompactSet]]) -> Ercs:
    """System built from a compact-closed-ball provider on the dense points.

    Basics are dyadic balls around dense points; patches are closed dyadic
    balls pruned into the provided compacts; a ball is formally below a
    patch when the exact dense-point distance plus the patch radius is
    strictly under the ball radius.
    """
    space = m.space
    cb_cache: dict[int, tuple[int, CompactSet]] = {}

    def provider(idx: int):
        if idx not in cb_cache:
            cb_cache[idx] = cb(idx)
        return cb_cache[idx]

    def ball_code(n: int, i: int):
        return _encode_metric_ball(space, m, m.dense(n), Fraction(1, 2 ** i))

    def patch_radius(mm: int, j: int) -> Fraction:
        k_m, _ = provider(mm)
        return Fraction(1, 2 ** max(k_m, j))

    def u_step(t: int):
        n, i = unpair(t)
        c = ball_code(n, i)
        return (c,) if c is not None and space.decode(c) is not None else ()

    def k_step(t: int):
        return (t,)  # kid = pair(m, j)

    def r_step(t: int):
        # a ball is formally below a patch when the dense-point distance
        # plus the ball radius stays strictly under the patch radius, which
        # certifies containment of the ball in the patch by the triangle
        # inequality
        a, b = unpair(t)
        n, i = unpair(a)
        mm, j = unpair(b)
        lhs = m.exact(m.dense(n), m.dense(mm)) + Fraction(1, 2 ** i)
        if lhs < patch_radius(mm, j):
            c = ball_code(n, i)
            if c is not None and space.decode(c) is not None:
                return ((c, pair(mm, j)),)
        return ()

    def kid_cdesc(kid: int):
        mm, j = unpair(kid)
        return _ball_desc(m, m.dense(mm), patch_radius(mm, j), closed=True)

    def kid_value(kid: int) -> CompactSet:
        mm, j = unpair(kid)
        center = exact_metric_point(m, m.dense(mm))
        ball = closed_ball_closed(m, center, patch_radius(mm, j))
        _, base_compact = provider(mm)
        return intersect_closed_compact(ball, base_compact)

    return Ercs(space, enumerate_step(u_step), enumerate_step(k_step),
                enumerate_step(r_step), kid_cdesc, kid_value)


# ---------------------------------------------------------------------------
# Radius

class _HitsEscapeClosedBall(Machine):
    """Scans overt hits for one certified entirely outside the closed ball;
    the streamed equivalent of matching a hit inside an enumerated part of
    the ball-complement name (the generated ray chunks converge to exactly
    the strict outside)."""

    def __init__(self, m: MetricStructure, hits: MonotoneEnumerator[int],
                 xval, r: Fraction):
        super().__init__()
        self.m = m
        self.hits = hits
        self.xval = xval
        self.r = r

    def step(self, t: int) -> bool:
        for n in self.hits.between(4 * t, 4 * t + 4):
            d = self.m.space.decode(n)
            if _basic_outside_closed_ball(self.m, self.xval, d, self.r):
                return True
        if self.hits.quiescent(4 * t + 4):
            self.stall()
        return False


class _HitsInsideOpenBall(Machine):
    """Scans overt hits for one certified strictly inside the open ball;
    the streamed equivalent of matching a hit inside an enumerated shrinking
    core of the ball name."""

    def __init__(self, m: MetricStructure, hits: MonotoneEnumerator[int],
                 xval, r: Fraction):
        super().__init__()
        self.m = m
        self.hits = hits
        self.xval = xval
        self.r = r

    def step(self, t: int) -> bool:
        for n in self.hits.between(4 * t, 4 * t + 4):
            d = self.m.space.decode(n)
            if _basic_in_open_ball(self.m, self.xval, d, self.r):
                return True
        if self.hits.quiescent(4 * t + 4):
            self.stall()
        return False


def radius(m: MetricStructure, x: MetricPoint, k: CompactSet, v: OvertSet,
           hi_seed=Fraction(1)) -> CReal:
    """The radius rho with the named set equal to the closed ball around x.

    Upper certificates: the compact name fits in an open ball.  Lower
    certificates: the overt name escapes a closed ball.  If the two sides
    ever cross (the named set is not exactly a ball), any rational in the
    gap is a legitimate answer and the bracket freezes there.
    """

    def upper(r: Fraction) -> SemidecisionProcess:
        return compact_subset(k, ball_open(m, x, r))

    def lower(r: Fraction) -> SemidecisionProcess:
        if x.value is not None:
            return _HitsEscapeClosedBall(m, v.hits, x.value, r)
        return overt_meets(v, closed_ball_closed(m, x, r).complement)

    return BracketReal(_BracketMachine(Fraction(0), upper, lower,
                                       hi_seed=Fraction(hi_seed)))


# ---------------------------------------------------------------------------
# Nice radius via nested Baire-style refinement

class _NiceRadiusMachine(Machine):
    """Maintains a closed bracket of candidate radii inside (0, r); for each
    refinement level n it certifies a dyadic subinterval [a, b] whose
    epsilon-annulus inside the given compact ball is covered by the open
    thickening of the inner ball, which makes every radius in [a, b] safe
    at granularity 2**-n."""

    def __init__(self, m: MetricStructure, x: MetricPoint, r: Fraction,
                 k: CompactSet):
        super().__init__()
        self.m = m
        self.x = x
        self.r = Fraction(r)
        self.k = k
        self.lo = self.r / 8
        self.hi = self.r * 7 / 8
        self.level = 0
        self._probes: list[tuple[Fraction, Fraction, SemidecisionProcess, int]] = []
        self._cursor = 0
        self._reseed()

    def width(self) -> Fraction:
        return self.hi - self.lo

    def _candidates(self):
        w = self.hi - self.lo
        cands = []
        for depth in (2, 3):
            step = w / 2 ** depth
            for a in range(1, 2 ** depth - 1):
                lo = self.lo + a * step
                cands.append((lo, lo + step))
        return cands

    def _certificate(self, a: Fraction, b: Fraction) -> SemidecisionProcess:
        eps = min((b - a) / 2, a / 2)
        annulus = self._annulus_compact(a - eps, b + eps)
        near = self._near_sphere_open(a - eps, b + eps)
        return compact_subset(annulus, near)

    def _annulus_compact(self, lo: Fraction, hi: Fraction) -> CompactSet:
        space = self.m.space
        xv = self.x.value
        if _interval_like(space) or _piecewise(space):
            cdesc = space.make_cdesc([(xv - hi, xv - lo), (xv + lo, xv + hi)])
        elif _oracle_like(space):
            cdesc = frozenset(p for p in space.fs.points
                              if lo <= self.m.exact(xv, p) <= hi)
        else:
            raise OutOfSpace("nice radius needs an exact annulus description")
        shell = closed_from_cdesc(space, cdesc)
        return intersect_closed_compact(shell, self.k)

    def _near_sphere_open(self, ann_lo: Fraction, ann_hi: Fraction) -> OpenSet:
        """Basics u with a witness z strictly nearer to x than all of u and
        within 2**-level of all of u: every point y of u then has z inside
        both the ball of radius d(x, y) around x and the small ball around y.
        A generated lane tiles the annulus span; a filter lane completes."""
        space = self.m.space
        m = self.m
        xv = self.x.value
        rho = Fraction(1, 2 ** self.level)

        def witnessed(udesc) -> bool:
            lo_dist = _basic_min_dist(m, xv, udesc)
            if lo_dist <= 0:
                return False
            for z in self._witness_candidates(udesc, lo_dist, rho):
                if (m.exact(xv, z) < lo_dist
                        and _basic_in_open_ball(m, z, udesc, rho)):
                    return True
            return False

        def step(t: int):
            out = []
            s = emission_slot(t)
            if s == 0 and not _oracle_like(space):
                w = rho / 4
                span = ann_hi - ann_lo
                tiles = int(span / w) + 1
                for i in range(tiles):
                    for side in (-1, 1):
                        lo = xv + side * (ann_lo + i * w) - w
                        u = encode_interval(lo, lo + 2 * w)
                        if space.decode(u) is not None and witnessed(space.decode(u)):
                            out.append(u)
            d = space.decode(t)
            if d is not None and witnessed(d):
                out.append(t)
            return out

        return OpenSet(space, enumerate_step(step, stall_after=space.finite_basic_count),
                       label=f"near-sphere:{self.level}")

    def _witness_candidates(self, udesc, lo_dist: Fraction, rho: Fraction):
        m = self.m
        xv = self.x.value
        space = m.space
        if _oracle_like(space):
            return list(space.fs.points)
        cands = [xv]
        for side in (-1, 1):
            anchor = xv + side * lo_dist
            for frac in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
                z = anchor - side * rho * frac
                if (_piecewise(space) and space.in_carrier(z)) or (
                        _interval_like(space) and space.in_carrier(z)):
                    cands.append(z)
        return cands

    def _reseed(self) -> None:
        self._probes = [(a, b, self._certificate(a, b), 0)
                        for a, b in self._candidates()]
        self._cursor = 0

    def step(self, t: int) -> bool:
        if not self._probes:
            return False
        self._cursor %= len(self._probes)
        a, b, proc, f = self._probes[self._cursor]
        f += 1
        if proc.poll(f) is not None:
            self.lo, self.hi = a, b
            self.level += 1
            self._reseed()
        else:
            self._probes[self._cursor] = (a, b, proc, f)
            self._cursor += 1
        return False


class NiceRadiusReal(CReal):
    def __init__(self, machine: _NiceRadiusMachine):
        self.machine = machine
        self._stage = 0
        self._best: dict[int, tuple[Fraction, Fraction]] = {}

    def approx(self, k: int, fuel: int | None = None):
        if k in self._best:
            return self._best[k]
        budget = DEFAULT_APPROX_FUEL if fuel is None else fuel
        width = Fraction(1, 2 ** k)
        while True:
            if self.machine.width() <= width:
                got = (self.machine.lo, self.machine.hi)
                self._best[k] = got
                return got
            if self._stage >= budget:
                return None
            self._stage += 1
            self.machine.poll(self._stage)


def nice_radius(m: MetricStructure, x: MetricPoint, r, k: CompactSet) -> CReal:
    """Some radius r' in (0, r) whose open ball closure is the closed ball."""
    return NiceRadiusReal(_NiceRadiusMachine(m, x, Fraction(r), k))


# ---------------------------------------------------------------------------
# Distance to a located set

class _SigmaHull:
    """Growing union of the system's patches, with an exact description."""

    def __init__(self, e: Ercs):
        self.e = e
        self.space = e.space
        self._cursor = 0
        self._descs: list = []
        self._union = None

    def grow(self) -> None:
        self.e.k_stream.advance(self._cursor + 1)
        for kid in self.e.k_stream.between(self._cursor, self._cursor + 1):
            d = self.e.compact_cdesc(kid)
            if d is not None:
                self._descs.append((kid, d))
                self._union = (d if self._union is None
                               else self.space.cdesc_union(self._union, d))
        self._cursor += 1

    def cover_of(self, cdesc, budget: int) -> CompactSet | None:
        """A compact union of patches whose description covers cdesc."""
        for _ in range(budget):
            if self._union is not None and self._covers(cdesc):
                kids = [kid for kid, _ in self._descs]
                from .ercs import whole_space_compact
                return whole_space_compact(self.e, kids)
            self.grow()
        return None

    def _covers(self, cdesc) -> bool:
        if self._union is None:
            return False
        space = self.space
        if _interval_like(space) or _piecewise(space):
            merged: list[list[Fraction]] = []
            pieces = sorted(pc for _, d in self._descs for pc in d)
            for p, q in pieces:
                if merged and p <= merged[-1][1]:
                    merged[-1][1] = max(merged[-1][1], q)
                else:
                    merged.append([p, q])
            return all(any(mp <= u and v <= mq for mp, mq in merged)
                       for u, v in cdesc)
        if _oracle_like(space):
            got = frozenset()
            for _, d in self._descs:
                got |= d
            return cdesc <= got
        return False


def distance_to_located(m: MetricStructure, e: Ercs, x: MetricPoint,
                        a: LocatedSet, hi_seed=Fraction(1)) -> CReal:
    """Infimum distance from x to a nonempty located set.

    Upper certificates: the overt part meets an open ball.  Lower
    certificates: a compact closed ball around x is certified inside the
    complement of the closed part.
    """
    sigma = _SigmaHull(e)

    def upper(r: Fraction) -> SemidecisionProcess:
        if x.value is not None:
            return _HitsInsideOpenBall(m, a.overt_part.hits, x.value, r)
        return overt_meets(a.overt_part, ball_open(m, x, r))

    def lower(r: Fraction) -> SemidecisionProcess:
        return _LowerDistanceCert(m, e, sigma, x, a, r)

    return BracketReal(_BracketMachine(Fraction(0), upper, lower,
                                       hi_seed=Fraction(hi_seed)))


class _LowerDistanceCert(Machine):
    """Certifies that the closed ball of radius r misses the located set:
    builds the ball as a compact set (pruned out of a sigma-patch union
    covering it) and semidecides inclusion in the closed part's complement."""

    def __init__(self, m: MetricStructure, e: Ercs, sigma: _SigmaHull,
                 x: MetricPoint, a: LocatedSet, r: Fraction):
        super().__init__()
        self.m = m
        self.e = e
        self.sigma = sigma
        self.x = x
        self.a = a
        self.r = r
        self._inner: SemidecisionProcess | None = None
        self._inner_fuel = 0

    def step(self, t: int) -> bool:
        if self._inner is None:
            cdesc = _ball_desc(self.m, self.x.value, self.r, closed=True)
            if cdesc is None:
                self.stall()
                return False
            hull = self.sigma.cover_of(cdesc, budget=4)
            if hull is None:
                return False
            ball = closed_ball_closed(self.m, self.x, self.r)
            k_ball = intersect_closed_compact(ball, hull)
            self._inner = compact_subset(k_ball, self.a.closed_part.complement)
        self._inner_fuel += 1
        return self._inner.poll(self._inner_fuel) is not None


# ---------------------------------------------------------------------------
# Hausdorff distance

def _far_open(space: Space, udesc, r: Fraction) -> OpenSet:
    """Points at distance more than r from the basic u (interval spaces)."""
    a, b = udesc

    def step(t: int):
        s = emission_slot(t)
        if s is None:
            return ()
        width = Fraction(2 ** s)
        out = [encode_interval(a - r - width, a - r),
               encode_interval(b + r, b + r + width)]
        return [c for c in out if space.decode(c) is not None]

    return OpenSet(space, enumerate_step(step), label=f"far:{r}")


_THICK_CODE: dict[tuple[int, int, int], int] = {}


def _thickening_open(space: Space, hits: MonotoneEnumerator[int], r: Fraction) -> OpenSet:
    """Open r-thickening of a set given by overt hits (interval spaces)."""
    rkey = (r.numerator, r.denominator)

    class _Thick(MonotoneEnumerator[int]):
        def __init__(self) -> None:
            super().__init__()
            self._seen: set[int] = set()

        def step(self, t: int):
            out = []
            for n in hits.between(t, t + 1):
                key = (n,) + rkey
                c = _THICK_CODE.get(key)
                if c is None:
                    a, b = space.decode(n)
                    c = encode_interval(b - r, a + r) if b - a < 2 * r else -1
                    _THICK_CODE[key] = c
                if c >= 0 and c not in self._seen and space.decode(c) is not None:
                    self._seen.add(c)
                    out.append(c)
            if hits.quiescent(t + 1):
                self.stall()
            return out

    return OpenSet(space, _Thick(), label=f"thick:{r}")


class _DirectedFarCert(Machine):
    """Certifies sup over the first set of the distance to the second set
    is >= r: some overt hit of the first is uniformly farther than r from
    the second set's compact hull.

    With a described hull the per-hit check is a pair of exact endpoint
    comparisons; otherwise one inclusion machine per hit is raced.
    """

    def __init__(self, space: Space, hits: MonotoneEnumerator[int],
                 other_hull: CompactSet, r: Fraction):
        super().__init__()
        self.space = space
        self.hits = hits
        self.other_hull = other_hull
        self.r = r
        from collections import deque
        self._queue = deque()
        self._seen: set[int] = set()
        self._live: list[tuple[SemidecisionProcess, int]] = []
        self._next = 0

    def _hull_far_from(self, d) -> bool:
        a, b = d
        lo, hi = a - self.r, b + self.r
        return all(q < lo or p > hi for p, q in self.other_hull.cdesc)

    def step(self, t: int) -> bool:
        if self.other_hull.cdesc is not None:
            for n in self.hits.between(4 * t, 4 * t + 4):
                if self._hull_far_from(self.space.decode(n)):
                    return True
            if self.hits.quiescent(4 * t + 4):
                self.stall()
            return False
        for n in self.hits.between(t, t + 1):
            if n not in self._seen:
                self._seen.add(n)
                self._queue.append(n)
        if self._queue:  # spawn lazily, one certificate per stage
            n = self._queue.popleft()
            d = self.space.decode(n)
            self._live.append(
                (compact_subset(self.other_hull, _far_open(self.space, d, self.r)), 0))
        if self._live:
            self._next %= len(self._live)
            proc, f = self._live[self._next]
            f += 1
            if proc.poll(f) is not None:
                return True
            self._live[self._next] = (proc, f)
            self._next += 1
        return False


class _ThickCoverCert(Machine):
    """Certifies that a described compact hull sits inside the open
    r-thickening of a set given by overt hits.

    Coverage of each hull piece is tracked as a rolling reach: a new
    thickening part extends the covered prefix of the piece when it
    overlaps it.  Parts arriving right of a gap are dropped; this is sound,
    and complete because the generated anchor grids re-sweep every piece
    left to right at each finer resolution.
    """

    def __init__(self, space: Space, hull_cdesc, hits: MonotoneEnumerator[int],
                 r: Fraction):
        super().__init__()
        self.space = space
        self.pieces = list(hull_cdesc)
        self.hits = hits
        self.r = r
        self._reach: list[Fraction | None] = [None] * len(self.pieces)

    def _feed(self, lo: Fraction, hi: Fraction) -> bool:
        done = True
        for i, (p, q) in enumerate(self.pieces):
            reach = self._reach[i]
            if reach is not None and reach > q:
                continue
            if reach is None:
                if lo < p and hi > p:
                    reach = self._reach[i] = hi
            elif lo < reach and hi > reach:
                reach = self._reach[i] = hi
            if reach is None or reach <= q:
                done = False
        return done

    def step(self, t: int) -> bool:
        sp = self.space
        r = self.r
        done = False
        for n in self.hits.between(4 * t, 4 * t + 4):
            a, b = sp.decode(n)
            if b - a < 2 * r:
                done = self._feed(b - r, a + r)
        if done:
            return True
        if self.hits.quiescent(4 * t + 4):
            self.stall()
        return False


def _thick_cover(space: Space, hull: CompactSet, hits, r: Fraction):
    if hull.cdesc is not None and (_interval_like(space) or _piecewise(space)):
        return _ThickCoverCert(space, hull.cdesc, hits, r)
    return compact_subset(hull, _thickening_open(space, hits, r))


def hausdorff_distance(m: MetricStructure, e: Ercs, a: LocatedSet, b: LocatedSet,
                       whole_hint: Sequence[int], hi_seed=Fraction(1)) -> CReal:
    """Hausdorff distance between nonempty located sets in a computably
    compact ambient space (the hint names patches covering the space)."""
    from .ercs import whole_space_compact

    space = m.space
    whole = whole_space_compact(e, whole_hint)
    k_a = intersect_closed_compact(a.closed_part, whole)
    k_b = intersect_closed_compact(b.closed_part, whole)

    def upper(r: Fraction) -> SemidecisionProcess:
        from .kernel import both_accept
        return both_accept(
            _thick_cover(space, k_a, b.overt_part.hits, r),
            _thick_cover(space, k_b, a.overt_part.hits, r),
        )

    def lower(r: Fraction) -> SemidecisionProcess:
        from .kernel import any_accepts
        return any_accepts(
            _DirectedFarCert(space, a.overt_part.hits, k_b, r),
            _DirectedFarCert(space, b.overt_part.hits, k_a, r),
        )

    return BracketReal(_BracketMachine(Fraction(0), upper, lower,
                                       hi_seed=Fraction(hi_seed)))
