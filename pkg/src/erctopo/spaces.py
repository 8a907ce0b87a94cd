"""Concrete represented spaces and their countable bases.

A space here is a countable family of coded basic opens together with a
sound, decidable containment calculus on their descriptions.  Points are
named by monotone enumerations of basic opens containing them; all
endpoint arithmetic is exact rational arithmetic, never floating point.

Registered instance spaces: the rational line, the unit interval (basics
are traces of rational intervals), Cantor space (basics are cylinders),
the star space made of countably many unit-interval arms glued at a
center, and the one-point compactification of the rationals.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterable, Sequence

from .kernel import (
    MonotoneEnumerator,
    enumerate_step,
    pair,
    unpair,
)


class UnknownSpace(Exception):
    pass


class MalformedLiteral(Exception):
    pass


class OutOfSpace(Exception):
    pass


# ---------------------------------------------------------------------------
# Integer / rational / word codes

def zigzag(n: int) -> int:
    """Natural -> integer: 0, -1, 1, -2, 2, ..."""
    return n // 2 if n % 2 == 0 else -(n + 1) // 2


def zigzag_inv(k: int) -> int:
    return 2 * k if k >= 0 else -2 * k - 1


def decode_rational(n: int) -> Fraction:
    u, v = unpair(n)
    return Fraction(zigzag(u), v + 1)


_RAT_CODE: dict[tuple[int, int], int] = {}


def encode_rational(q: Fraction) -> int:
    q = Fraction(q)
    key = (q.numerator, q.denominator)
    try:
        return _RAT_CODE[key]
    except KeyError:
        n = pair(zigzag_inv(key[0]), key[1] - 1)
        _RAT_CODE[key] = n
        return n


def decode_interval(n: int) -> tuple[Fraction, Fraction]:
    i, j = unpair(n)
    return decode_rational(i), decode_rational(j)


def encode_interval(lo, hi) -> int:
    return pair(encode_rational(Fraction(lo)), encode_rational(Fraction(hi)))


def word_rank(w: str) -> int:
    """Binary words ordered by length then value; '' -> 0, '0' -> 1, '1' -> 2."""
    return (1 << len(w)) - 1 + (int(w, 2) if w else 0)


def word_unrank(n: int) -> str:
    length = (n + 1).bit_length() - 1
    offset = n - ((1 << length) - 1)
    return format(offset, "b").zfill(length) if length else ""


def encode_rational_set(qs: Iterable[Fraction]) -> int:
    n = 0
    for q in qs:
        n |= 1 << encode_rational(q)
    return n


def decode_rational_set(n: int) -> frozenset[Fraction]:
    out = []
    i = 0
    while n:
        if n & 1:
            out.append(decode_rational(i))
        n >>= 1
        i += 1
    return frozenset(out)


def emission_slot(t: int) -> int | None:
    """Thinned schedule: slot s fires at the s-th triangular stage, so the
    number of generated items stays square-root-bounded in the stage count
    while fine slots still arrive at quadratic (not exponential) stages.
    Slots stop at 64: dyadic data beyond 2**-64 serves no consumer and its
    exact arithmetic costs grow with the exponent."""
    n = t + 1
    s = (isqrt(8 * n + 1) - 1) // 2
    if s * (s + 1) // 2 == n and s <= 65:
        return s - 1
    return None


# ---------------------------------------------------------------------------
# One-dimensional interval calculus with endpoint flags
#
# An "fiv" is (lo, lo_open, hi, hi_open) with lo <= hi; it denotes the set
# of x with lo <(=) x <(=) hi.  Keys order endpoints so that containment
# becomes two-sided dominance: lo_key uses closed=0 < open=1, hi_key uses
# open=0 < closed=1.

Fiv = tuple[Fraction, int, Fraction, int]


def fiv_nonempty(f: Fiv) -> bool:
    lo, lof, hi, hif = f
    return lo < hi or (lo == hi and not lof and not hif)


def fiv_lo_key(f: Fiv):
    return (f[0], f[1])


def fiv_hi_key(f: Fiv):
    return (f[2], 1 - f[3])


def fiv_subset(a: Fiv, b: Fiv) -> bool:
    """a included in b; both assumed nonempty."""
    return fiv_lo_key(b) <= fiv_lo_key(a) and fiv_hi_key(a) <= fiv_hi_key(b)


def fiv_disjoint(a: Fiv, b: Fiv) -> bool:
    lo_a, lof_a, hi_a, hif_a = a
    lo_b, lof_b, hi_b, hif_b = b
    if hi_a < lo_b or (hi_a == lo_b and (hif_a or lof_b)):
        return True
    if hi_b < lo_a or (hi_b == lo_a and (hif_b or lof_a)):
        return True
    return False


def fiv_member(x: Fraction, f: Fiv) -> bool:
    lo, lof, hi, hif = f
    if x < lo or (x == lo and lof):
        return False
    if x > hi or (x == hi and hif):
        return False
    return True


def fiv_mergeable(a: Fiv, b: Fiv) -> bool:
    """True when the union of a and b is again an interval."""
    if a[2] < b[0] or (a[2] == b[0] and a[3] and b[1]):
        return False
    if b[2] < a[0] or (b[2] == a[0] and b[3] and a[1]):
        return False
    return True


def fiv_hull(a: Fiv, b: Fiv) -> Fiv:
    lo = min(fiv_lo_key(a), fiv_lo_key(b))
    hi = max(fiv_hi_key(a), fiv_hi_key(b))
    return (lo[0], lo[1], hi[0], 1 - hi[1])


class FivUnion:
    """Growing union of fivs; answers whether it covers a given fiv.

    Components are kept sorted by left endpoint and pairwise non-mergeable.
    ``version`` counts the additions that actually changed the union, so
    callers can skip requerying an unchanged state.
    """

    def __init__(self) -> None:
        self._parts: list[Fiv] = []
        self._los: list[Fraction] = []
        self.version = 0

    def add(self, f: Fiv) -> None:
        if not fiv_nonempty(f):
            return
        parts, los = self._parts, self._los
        k = bisect_left(los, f[0])
        i = k
        while i > 0 and fiv_mergeable(parts[i - 1], f):
            i -= 1
        j = k
        while j < len(parts) and fiv_mergeable(parts[j], f):
            j += 1
        merged = f
        for p in parts[i:j]:
            merged = fiv_hull(merged, p)
        if j - i == 1 and parts[i] == merged:
            return
        parts[i:j] = [merged]
        los[i:j] = [merged[0]]
        self.version += 1

    def covers(self, f: Fiv) -> bool:
        if not fiv_nonempty(f):
            return True
        k = bisect_right(self._los, f[0])
        return k > 0 and fiv_subset(f, self._parts[k - 1])

    def covers_point(self, x: Fraction) -> bool:
        return self.covers((x, 0, x, 0))


class FivCoverIndex:
    """Antichain of maximal fivs answering: is a query inside SOME member?

    Members are sorted by lo key; being an antichain, hi keys increase with
    lo keys, so the best candidate container for a query is the member with
    the largest lo key not exceeding the query's.
    """

    def __init__(self) -> None:
        self._los: list[tuple] = []
        self._fivs: list[Fiv] = []

    def add(self, f: Fiv) -> None:
        if not fiv_nonempty(f) or self.contains(f):
            return
        k = bisect_left(self._los, fiv_lo_key(f))
        j = k
        while j < len(self._fivs) and fiv_subset(self._fivs[j], f):
            j += 1
        self._los[k:j] = [fiv_lo_key(f)]
        self._fivs[k:j] = [f]

    def contains(self, f: Fiv) -> bool:
        k = bisect_right(self._los, fiv_lo_key(f))
        return k > 0 and fiv_subset(f, self._fivs[k - 1])


class FivInsideIndex:
    """Antichain of minimal fivs answering: is SOME member inside a query?"""

    def __init__(self) -> None:
        self._los: list[tuple] = []
        self._fivs: list[Fiv] = []

    def add(self, f: Fiv) -> None:
        if not fiv_nonempty(f) or self.some_inside(f):
            return
        k = bisect_left(self._los, fiv_lo_key(f))
        j = k
        while j > 0 and fiv_subset(f, self._fivs[j - 1]):
            j -= 1
        self._los[j:k] = [fiv_lo_key(f)]
        self._fivs[j:k] = [f]

    def some_inside(self, f: Fiv) -> bool:
        k = bisect_left(self._los, fiv_lo_key(f))
        return k < len(self._fivs) and fiv_subset(self._fivs[k], f)


# ---------------------------------------------------------------------------
# Space interface

class Space:
    """A countably based space with a decidable calculus on basic opens.

    ``decode`` maps every natural number to a basic-open description or
    None when the index is malformed for this space; enumerations of basics
    only ever produce valid indices.  The containment and disjointness
    tests are sound, and complete for the registered instance spaces.
    """

    name: str = "?"

    # description-level calculus -------------------------------------------------
    def decode(self, n: int):
        raise NotImplementedError

    def basic_subset(self, d1, d2) -> bool:
        raise NotImplementedError

    def basic_disjoint(self, d1, d2) -> bool:
        raise NotImplementedError

    def point_in_basic(self, value, d) -> bool:
        raise NotImplementedError

    def cdesc_in_basic(self, cdesc, d) -> bool:
        """Sound test: compact description included in one basic open."""
        raise NotImplementedError

    def cdesc_nonempty(self, cdesc) -> bool:
        raise NotImplementedError

    def basic_meets_cdesc(self, d, cdesc) -> bool:
        """Sound (exact on instances): the basic intersects the described set."""
        raise NotImplementedError

    def basic_avoids_cdesc(self, d, cdesc) -> bool:
        """Sound (exact on instances): the basic misses the described set."""
        raise NotImplementedError

    def cdesc_intersect(self, c1, c2):
        """Exact intersection of compact descriptions, or None if unsupported."""
        return None

    def cdesc_union(self, c1, c2):
        """Exact union of compact descriptions, or None if unsupported."""
        return None

    # aggregate helpers ------------------------------------------------------
    def region(self) -> "Region":
        """Tracker for a growing union of basics."""
        raise NotImplementedError

    def cover_index(self):
        """Index of basics answering: is a query basic inside some member?"""
        return _ScanCoverIndex(self)

    def basic_inside_index(self):
        """Index of basics answering: is some member inside a query basic?"""
        return _ScanBasicInsideIndex(self)

    def cdesc_inside_index(self):
        """Index of compact descriptions answering: is some member inside a basic?"""
        return _ScanInsideIndex(self)

    # enumeration ------------------------------------------------------------
    finite_basic_count: int | None = None

    def all_basics(self) -> MonotoneEnumerator[int]:
        """Fresh enumeration of every valid basic index, in index order."""
        return enumerate_step(lambda t: (t,) if self.decode(t) is not None else (),
                              stall_after=self.finite_basic_count)

    def basic_intersection_code(self, d1, d2) -> int | None:
        """Index of the basic equal to the intersection, when that exists."""
        return None

    # optional structure -------------------------------------------------------
    metric: "MetricStructure | None" = None
    whole_compact_desc = None

    def sigma_piece_descs(self) -> Sequence[object]:
        """Compact pieces exhausting the space, when the space provides them."""
        return ()

    def local_pinch(self, vdesc, pdesc):
        """Given basics v (a candidate neighborhood) and p (a target), return
        a compact description K with v included in K included in p, or None.
        Soundness only; None never asserts impossibility."""
        return None

    def pinch_candidate(self, vdesc) -> bool:
        """False when no target can ever pinch with this neighborhood."""
        return True

    def pinch_target(self, pdesc) -> bool:
        """False when no neighborhood can ever pinch with this target."""
        return True

    def __repr__(self) -> str:
        return f"<space {self.name}>"


class Region:
    version = 0

    def add(self, desc) -> None:
        raise NotImplementedError

    def covers_cdesc(self, cdesc) -> bool:
        raise NotImplementedError


class _ScanCoverIndex:
    def __init__(self, space: Space):
        self.space = space
        self.members: list = []

    def add(self, d) -> None:
        self.members.append(d)

    def contains(self, d) -> bool:
        return any(self.space.basic_subset(d, m) for m in self.members)


class _ScanInsideIndex:
    def __init__(self, space: Space):
        self.space = space
        self.members: list = []

    def add(self, cdesc) -> None:
        self.members.append(cdesc)

    def some_inside(self, d) -> bool:
        return any(self.space.cdesc_in_basic(m, d) for m in self.members)


class _ScanBasicInsideIndex:
    def __init__(self, space: Space):
        self.space = space
        self.members: list = []

    def add(self, d) -> None:
        self.members.append(d)

    def some_inside(self, d) -> bool:
        return any(self.space.basic_subset(m, d) for m in self.members)


# ---------------------------------------------------------------------------
# Point names

class PointName:
    """A point given by a sound enumeration of basic opens containing it.

    ``value`` carries the exact fixture datum (a rational, a word, ...)
    when the name was built from one; generic algorithms never rely on it,
    verification code does.
    """

    def __init__(self, space: Space, neighborhoods: MonotoneEnumerator[int],
                 value=None):
        self.space = space
        self.neighborhoods = neighborhoods
        self.value = value

    def __repr__(self) -> str:
        return f"<point {self.value!r} in {self.space.name}>"


# ---------------------------------------------------------------------------
# Metric structure

class MetricStructure:
    """Dense sequence with an exactly computable distance.

    ``distance(i, j, k)`` returns a rational within 2**-k of the true
    distance between dense points i and j; every registered instance is
    exact, so the precision argument only caps the reported error.
    """

    def __init__(self, space: Space, dense: Callable[[int], object],
                 dense_index: Callable[[object], int],
                 exact: Callable[[object, object], Fraction]):
        self.space = space
        self.dense = dense
        self.dense_index = dense_index
        self.exact = exact

    def distance(self, i: int, j: int, k: int) -> Fraction:
        return self.exact(self.dense(i), self.dense(j))


# ---------------------------------------------------------------------------
# Interval-based spaces (line and unit interval)

class _IntervalSpaceBase(Space):
    lo_bound: Fraction | None = None  # carrier bounds for traces
    hi_bound: Fraction | None = None

    def __init__(self) -> None:
        self._decode_cache: dict[int, object] = {}

    # raw decode: open interval with rational endpoints
    def decode(self, n: int):
        try:
            return self._decode_cache[n]
        except KeyError:
            pass
        a, b = decode_interval(n)
        d = (a, b) if self._trace_nonempty(a, b) else None
        self._decode_cache[n] = d
        return d

    def _trace_nonempty(self, a: Fraction, b: Fraction) -> bool:
        if a >= b:
            return False
        if self.lo_bound is not None and b <= self.lo_bound:
            return False
        if self.hi_bound is not None and a >= self.hi_bound:
            return False
        return True

    def fiv(self, d) -> Fiv:
        """Effective endpoints of the trace of the open interval d."""
        a, b = d
        lo, lof = a, 1
        hi, hif = b, 1
        if self.lo_bound is not None and a < self.lo_bound:
            lo, lof = self.lo_bound, 0
        if self.hi_bound is not None and b > self.hi_bound:
            hi, hif = self.hi_bound, 0
        return (lo, lof, hi, hif)

    def cfiv(self, piece) -> Fiv:
        """Closed piece (p, q) as a flagged interval, clamped to the carrier."""
        p, q = piece
        if self.lo_bound is not None:
            p = max(p, self.lo_bound)
        if self.hi_bound is not None:
            q = min(q, self.hi_bound)
        return (p, 0, q, 0)

    def basic_subset(self, d1, d2) -> bool:
        return fiv_subset(self.fiv(d1), self.fiv(d2))

    def basic_disjoint(self, d1, d2) -> bool:
        return fiv_disjoint(self.fiv(d1), self.fiv(d2))

    def point_in_basic(self, value, d) -> bool:
        return self.in_carrier(value) and fiv_member(value, self.fiv(d))

    def in_carrier(self, x: Fraction) -> bool:
        if self.lo_bound is not None and x < self.lo_bound:
            return False
        if self.hi_bound is not None and x > self.hi_bound:
            return False
        return True

    # compact descriptions: tuple of closed rational pieces (p, q), p <= q,
    # sorted and disjoint, already clamped to the carrier.
    def make_cdesc(self, pieces) -> tuple:
        out = []
        for p, q in sorted((Fraction(p), Fraction(q)) for p, q in pieces):
            if self.lo_bound is not None:
                p = max(p, self.lo_bound)
            if self.hi_bound is not None:
                q = min(q, self.hi_bound)
            if p > q:
                continue
            if out and p <= out[-1][1]:
                out[-1] = (out[-1][0], max(out[-1][1], q))
            else:
                out.append((p, q))
        return tuple(out)

    def cdesc_in_basic(self, cdesc, d) -> bool:
        f = self.fiv(d)
        return all(fiv_subset(self.cfiv(piece), f) for piece in cdesc)

    def cdesc_nonempty(self, cdesc) -> bool:
        return bool(cdesc)

    def cdesc_hull(self, cdesc) -> Fiv | None:
        if not cdesc:
            return None
        return (cdesc[0][0], 0, cdesc[-1][1], 0)

    def basic_meets_cdesc(self, d, cdesc) -> bool:
        f = self.fiv(d)
        return any(not fiv_disjoint(f, self.cfiv(p)) for p in cdesc)

    def basic_avoids_cdesc(self, d, cdesc) -> bool:
        return not self.basic_meets_cdesc(d, cdesc)

    def cdesc_intersect(self, c1, c2):
        out = []
        for p1, q1 in c1:
            for p2, q2 in c2:
                lo, hi = max(p1, p2), min(q1, q2)
                if lo <= hi:
                    out.append((lo, hi))
        return self.make_cdesc(out)

    def cdesc_union(self, c1, c2):
        return self.make_cdesc(list(c1) + list(c2))

    def basic_intersection_code(self, d1, d2) -> int | None:
        a, b = max(d1[0], d2[0]), min(d1[1], d2[1])
        return encode_interval(a, b) if self._trace_nonempty(a, b) else None

    def region(self) -> Region:
        return _IntervalRegion(self)

    def cover_index(self):
        return _FivBasicCoverIndex(self)

    def basic_inside_index(self):
        return _FivBasicInsideIndex(self)

    def cdesc_inside_index(self):
        return _FivHullInsideIndex(self)

    def local_pinch(self, vdesc, pdesc):
        vf, pf = self.fiv(vdesc), self.fiv(pdesc)
        if not fiv_subset(vf, pf):
            return None
        lo = vf[0] if pf[0] == vf[0] and not pf[1] else (pf[0] + vf[0]) / 2
        hi = vf[2] if pf[2] == vf[2] and not pf[3] else (pf[2] + vf[2]) / 2
        if not (fiv_subset(vf, (lo, 0, hi, 0)) and fiv_subset((lo, 0, hi, 0), pf)):
            return None
        return self.make_cdesc([(lo, hi)])


class _IntervalRegion(Region):
    def __init__(self, space: _IntervalSpaceBase):
        self.space = space
        self.union = FivUnion()

    @property
    def version(self) -> int:
        return self.union.version

    def add(self, desc) -> None:
        self.union.add(self.space.fiv(desc))

    def covers_cdesc(self, cdesc) -> bool:
        return all(self.union.covers(self.space.cfiv(p)) for p in cdesc)


class _FivBasicCoverIndex:
    def __init__(self, space: _IntervalSpaceBase):
        self.space = space
        self.index = FivCoverIndex()

    def add(self, d) -> None:
        self.index.add(self.space.fiv(d))

    def contains(self, d) -> bool:
        return self.index.contains(self.space.fiv(d))


class _FivBasicInsideIndex:
    def __init__(self, space: _IntervalSpaceBase):
        self.space = space
        self.index = FivInsideIndex()

    def add(self, d) -> None:
        self.index.add(self.space.fiv(d))

    def some_inside(self, d) -> bool:
        return self.index.some_inside(self.space.fiv(d))


class _FivHullInsideIndex:
    def __init__(self, space: _IntervalSpaceBase):
        self.space = space
        self.index = FivInsideIndex()

    def add(self, cdesc) -> None:
        hull = self.space.cdesc_hull(cdesc)
        if hull is not None:
            self.index.add(hull)

    def some_inside(self, d) -> bool:
        return self.index.some_inside(self.space.fiv(d))


def _rational_dense(space: Space, carrier: Callable[[Fraction], bool]):
    """Dense sequence of rationals filtered by a carrier predicate."""
    values: list[Fraction] = []
    positions: dict[Fraction, int] = {}
    cursor = [0]

    def grow_until(k: int) -> None:
        while len(values) <= k:
            q = decode_rational(cursor[0])
            cursor[0] += 1
            if carrier(q) and q not in positions:
                positions[q] = len(values)
                values.append(q)

    def dense(i: int):
        grow_until(i)
        return values[i]

    def dense_index(q) -> int:
        q = Fraction(q)
        if not carrier(q):
            raise OutOfSpace(f"{q} is not a point of {space.name}")
        while q not in positions:
            grow_until(len(values))
        return positions[q]

    return dense, dense_index


class LineSpace(_IntervalSpaceBase):
    name = "real-line"

    def __init__(self) -> None:
        super().__init__()
        dense, dense_index = _rational_dense(self, lambda q: True)
        self.metric = MetricStructure(self, dense, dense_index,
                                      lambda p, q: abs(p - q))


class UnitIntervalSpace(_IntervalSpaceBase):
    name = "unit-interval"
    lo_bound = Fraction(0)
    hi_bound = Fraction(1)

    def __init__(self) -> None:
        super().__init__()
        dense, dense_index = _rational_dense(self, lambda q: 0 <= q <= 1)
        self.metric = MetricStructure(self, dense, dense_index,
                                      lambda p, q: abs(p - q))
        self.whole_compact_desc = self.make_cdesc([(0, 1)])

    def sigma_piece_descs(self):
        return (self.whole_compact_desc,)


class PiecewiseSpace(Space):
    """Finite unions of closed rational intervals as a subspace of the line.

    Basics are rational-interval traces; a trace may be scattered across
    several carrier pieces, so all calculus is done piecewise.  Used for
    metric fixtures whose carrier is disconnected.
    """

    def __init__(self, pieces, name: str = "pieces"):
        self.pieces = tuple(sorted((Fraction(p), Fraction(q)) for p, q in pieces))
        if not self.pieces or any(p > q for p, q in self.pieces):
            raise ValueError("carrier needs nonempty closed pieces")
        self.name = name
        self._decode_cache: dict[int, object] = {}
        dense, dense_index = _rational_dense(self, self.in_carrier)
        self.metric = MetricStructure(self, dense, dense_index,
                                      lambda a, b: abs(a - b))
        self.whole_compact_desc = self.make_cdesc(self.pieces)

    def in_carrier(self, x: Fraction) -> bool:
        return any(p <= x <= q for p, q in self.pieces)

    def trace(self, d) -> list[Fiv]:
        a, b = d
        out = []
        for p, q in self.pieces:
            lo, lof = (a, 1) if a >= p else (p, 0)
            hi, hif = (b, 1) if b <= q else (q, 0)
            f = (lo, lof, hi, hif)
            if fiv_nonempty(f):
                out.append(f)
        return out

    def decode(self, n: int):
        try:
            return self._decode_cache[n]
        except KeyError:
            pass
        a, b = decode_interval(n)
        d = (a, b) if a < b and self.trace((a, b)) else None
        self._decode_cache[n] = d
        return d

    def basic_subset(self, d1, d2) -> bool:
        t2 = self.trace(d2)
        for f1 in self.trace(d1):
            if not any(fiv_subset(f1, f2) for f2 in t2):
                return False
        return True

    def basic_disjoint(self, d1, d2) -> bool:
        return all(fiv_disjoint(f1, f2)
                   for f1 in self.trace(d1) for f2 in self.trace(d2))

    def point_in_basic(self, value, d) -> bool:
        return self.in_carrier(value) and d[0] < value < d[1]

    def make_cdesc(self, ps) -> tuple:
        clipped = []
        for u, v in ps:
            u, v = Fraction(u), Fraction(v)
            for p, q in self.pieces:
                lo, hi = max(u, p), min(v, q)
                if lo <= hi:
                    clipped.append((lo, hi))
        out: list[tuple[Fraction, Fraction]] = []
        for lo, hi in sorted(clipped):
            if out and lo <= out[-1][1]:
                out[-1] = (out[-1][0], max(out[-1][1], hi))
            else:
                out.append((lo, hi))
        return tuple(out)

    def cdesc_in_basic(self, cdesc, d) -> bool:
        traces = self.trace(d)
        return all(any(fiv_subset((p, 0, q, 0), f) for f in traces)
                   for p, q in cdesc)

    def cdesc_nonempty(self, cdesc) -> bool:
        return bool(cdesc)

    def basic_meets_cdesc(self, d, cdesc) -> bool:
        return any(not fiv_disjoint(f, (p, 0, q, 0))
                   for f in self.trace(d) for p, q in cdesc)

    def basic_avoids_cdesc(self, d, cdesc) -> bool:
        return not self.basic_meets_cdesc(d, cdesc)

    def cdesc_intersect(self, c1, c2):
        out = []
        for p1, q1 in c1:
            for p2, q2 in c2:
                lo, hi = max(p1, p2), min(q1, q2)
                if lo <= hi:
                    out.append((lo, hi))
        return self.make_cdesc(out)

    def cdesc_union(self, c1, c2):
        return self.make_cdesc(list(c1) + list(c2))

    def basic_intersection_code(self, d1, d2) -> int | None:
        a, b = max(d1[0], d2[0]), min(d1[1], d2[1])
        if a < b and self.trace((a, b)):
            return encode_interval(a, b)
        return None

    def region(self) -> Region:
        return _PiecewiseRegion(self)

    def sigma_piece_descs(self):
        return tuple(((p, q),) for p, q in self.pieces)

    def local_pinch(self, vdesc, pdesc):
        if not self.basic_subset(vdesc, pdesc):
            return None
        k = self.make_cdesc([vdesc])
        if self.cdesc_in_basic(k, pdesc):
            return k
        return None

    def fiv(self, d) -> Fiv:
        # used by metric helpers; the hull of the trace (sound for one-piece
        # traces, conservative otherwise)
        a, b = d
        return (a, 1, b, 1)


class _PiecewiseRegion(Region):
    def __init__(self, space: PiecewiseSpace):
        self.space = space
        self.union = FivUnion()

    @property
    def version(self) -> int:
        return self.union.version

    def add(self, desc) -> None:
        for f in self.space.trace(desc):
            self.union.add(f)

    def covers_cdesc(self, cdesc) -> bool:
        return all(self.union.covers((p, 0, q, 0)) for p, q in cdesc)


def point_from_rational(space: Space, q) -> PointName:
    """Name of a rational point: sound at every stage, complete in the limit."""
    q = Fraction(q)
    if isinstance(space, (_IntervalSpaceBase, PiecewiseSpace)):
        if not space.in_carrier(q):
            raise OutOfSpace(f"{q} outside carrier of {space.name}")

        def step(t: int):
            out = []
            s = emission_slot(t)
            if s is not None:
                eps = Fraction(1, 2 ** s)
                out.append(encode_interval(q - eps, q + eps))
            d = space.decode(t)
            if d is not None and space.point_in_basic(q, d):
                out.append(t)
            return out

        return PointName(space, enumerate_step(step), value=q)
    raise OutOfSpace(f"{space.name} has no rational-point names")


# ---------------------------------------------------------------------------
# Cantor space

class CantorSpace(Space):
    name = "cantor"

    def __init__(self) -> None:
        self._decode_cache: dict[int, str] = {}

    def decode(self, n: int):
        try:
            return self._decode_cache[n]
        except KeyError:
            w = word_unrank(n)
            self._decode_cache[n] = w
            return w

    def basic_subset(self, d1: str, d2: str) -> bool:
        return d1.startswith(d2)

    def basic_disjoint(self, d1: str, d2: str) -> bool:
        return not d1.startswith(d2) and not d2.startswith(d1)

    def point_in_basic(self, value, w: str) -> bool:
        prefix, period = value
        return _cantor_word(value, len(w)) == w

    # compact description: tuple of cylinder words, sorted, prefix-reduced
    def make_cdesc(self, words) -> tuple:
        ws = sorted(set(words), key=lambda w: (len(w), w))
        out: list[str] = []
        for w in ws:
            if not any(w.startswith(v) for v in out):
                out.append(w)
        return tuple(sorted(out))

    def cdesc_in_basic(self, cdesc, d: str) -> bool:
        return all(w.startswith(d) for w in cdesc)

    def cdesc_nonempty(self, cdesc) -> bool:
        return bool(cdesc)

    def basic_meets_cdesc(self, d: str, cdesc) -> bool:
        return any(not self.basic_disjoint(d, w) for w in cdesc)

    def basic_avoids_cdesc(self, d: str, cdesc) -> bool:
        return not self.basic_meets_cdesc(d, cdesc)

    def cdesc_intersect(self, c1, c2):
        out = []
        for v in c1:
            for w in c2:
                if v.startswith(w):
                    out.append(v)
                elif w.startswith(v):
                    out.append(w)
        return self.make_cdesc(out)

    def cdesc_union(self, c1, c2):
        return self.make_cdesc(tuple(c1) + tuple(c2))

    def basic_intersection_code(self, d1: str, d2: str) -> int | None:
        if d1.startswith(d2):
            return word_rank(d1)
        if d2.startswith(d1):
            return word_rank(d2)
        return None

    def region(self) -> Region:
        return _CantorRegion()

    def cover_index(self):
        return _CantorCoverIndex()

    def basic_inside_index(self):
        return _CantorBasicInsideIndex()

    def cdesc_inside_index(self):
        return _CantorInsideIndex()

    whole_compact_desc = ("",)

    def sigma_piece_descs(self):
        return (("",),)

    def local_pinch(self, vdesc: str, pdesc: str):
        if vdesc.startswith(pdesc):
            return (vdesc,)
        return None


def _cantor_word(value, k: int) -> str:
    prefix, period = value
    w = prefix
    while len(w) < k:
        w += period
    return w[:k]


def cantor_point(space: CantorSpace, prefix: str, period: str = "0") -> PointName:
    if set(prefix + period) - {"0", "1"} or not period:
        raise OutOfSpace("cantor points need a binary prefix and nonempty period")
    value = (prefix, period)

    def step(t: int):
        out = []
        s = emission_slot(t)
        if s is not None:
            out.append(word_rank(_cantor_word(value, s)))
        w = space.decode(t)
        if w is not None and space.point_in_basic(value, w):
            out.append(t)
        return out

    return PointName(space, enumerate_step(step), value=value)


class _CantorRegion(Region):
    """Covered-subtree marks: a node is covered when added or when both
    children are covered."""

    def __init__(self) -> None:
        self.marked: set[str] = set()
        self.version = 0

    def add(self, w: str) -> None:
        if self._covered(w):
            return
        self.version += 1
        self.marked.add(w)
        while w:
            parent = w[:-1]
            sibling = parent + ("1" if w[-1] == "0" else "0")
            if sibling in self.marked and not self._has_marked_ancestor(parent):
                self.marked.add(parent)
                w = parent
            else:
                break

    def _has_marked_ancestor(self, w: str) -> bool:
        for k in range(len(w) + 1):
            if w[:k] in self.marked:
                return True
        return False

    def _covered(self, w: str) -> bool:
        return self._has_marked_ancestor(w)

    def covers_cdesc(self, cdesc) -> bool:
        return all(self._covered(w) for w in cdesc)


class _CantorCoverIndex:
    def __init__(self) -> None:
        self.words: set[str] = set()

    def add(self, w: str) -> None:
        self.words.add(w)

    def contains(self, w: str) -> bool:
        return any(w[:k] in self.words for k in range(len(w) + 1))


class _CantorBasicInsideIndex:
    def __init__(self) -> None:
        self.prefixes: set[str] = set()

    def add(self, w: str) -> None:
        for k in range(len(w) + 1):
            self.prefixes.add(w[:k])

    def some_inside(self, d: str) -> bool:
        return d in self.prefixes


class _CantorInsideIndex:
    def __init__(self) -> None:
        self.prefixes: set[str] = set()

    def add(self, cdesc) -> None:
        if not cdesc:
            return
        lcp = cdesc[0]
        for w in cdesc[1:]:
            k = 0
            while k < min(len(lcp), len(w)) and lcp[k] == w[k]:
                k += 1
            lcp = lcp[:k]
        for k in range(len(lcp) + 1):
            self.prefixes.add(lcp[:k])

    def some_inside(self, d: str) -> bool:
        return d in self.prefixes


# ---------------------------------------------------------------------------
# Star space: arms {n} x [0,1] glued at a center point

INF = ("inf",)


def star_distance(p1, p2, k: int | None = None) -> Fraction:
    """Exact distance in the star space.

    Points are INF or pairs (n, x) with x a rational in [0, 1]; the center
    sits at distance 2**-n + x from (n, x), points of one arm are at |x - y|,
    and points of distinct arms are joined through the center.
    """
    if p1 == p2:
        return Fraction(0)
    if p1 == INF:
        n, x = p2
        return Fraction(1, 2 ** n) + x
    if p2 == INF:
        n, x = p1
        return Fraction(1, 2 ** n) + x
    n, x = p1
    m, y = p2
    if n == m:
        return abs(x - y)
    return x + y + Fraction(1, 2 ** n) + Fraction(1, 2 ** m)


class StarSpace(Space):
    """Countably many unit-interval arms glued at a single center point.

    Basic opens are metric balls around dense points.  Compact pieces are
    the center singleton and closed arm segments.
    """

    name = "star"

    def __init__(self) -> None:
        self._decode_cache: dict[int, object] = {}
        self._dense_cache: list = [INF]
        self._dense_pos: dict = {INF: 0}
        self._unit_vals: list[Fraction] = []
        self._unit_pos: dict[Fraction, int] = {}
        self._unit_cursor = 0
        self.metric = MetricStructure(self, self.dense, self.dense_index,
                                      star_distance)

    # dense sequence: center first, then (arm, rational) dovetailed
    def _unit_rational(self, i: int) -> Fraction:
        while len(self._unit_vals) <= i:
            q = decode_rational(self._unit_cursor)
            self._unit_cursor += 1
            if 0 <= q <= 1 and q not in self._unit_pos:
                self._unit_pos[q] = len(self._unit_vals)
                self._unit_vals.append(q)
        return self._unit_vals[i]

    def _unit_rational_index(self, q: Fraction) -> int:
        while q not in self._unit_pos:
            self._unit_rational(len(self._unit_vals))
        return self._unit_pos[q]

    def dense(self, i: int):
        if i == 0:
            return INF
        n, qi = unpair(i - 1)
        return (n, self._unit_rational(qi))

    def dense_index(self, p) -> int:
        if p == INF:
            return 0
        n, x = p
        return pair(n, self._unit_rational_index(Fraction(x))) + 1

    def is_point(self, p) -> bool:
        if p == INF:
            return True
        return (isinstance(p, tuple) and len(p) == 2 and isinstance(p[0], int)
                and p[0] >= 0 and 0 <= Fraction(p[1]) <= 1)

    # basics: balls (center dense index, positive rational radius)
    def decode(self, n: int):
        try:
            return self._decode_cache[n]
        except KeyError:
            pass
        i, rc = unpair(n)
        r = decode_rational(rc)
        d = ("ball", self.dense(i), r) if r > 0 else None
        self._decode_cache[n] = d
        return d

    def encode_ball(self, center, r: Fraction) -> int:
        return pair(self.dense_index(center), encode_rational(Fraction(r)))

    def basic_subset(self, d1, d2) -> bool:
        _, c1, r1 = d1
        _, c2, r2 = d2
        return star_distance(c1, c2) + r1 <= r2

    def basic_disjoint(self, d1, d2) -> bool:
        _, c1, r1 = d1
        _, c2, r2 = d2
        return star_distance(c1, c2) >= r1 + r2

    def point_in_basic(self, value, d) -> bool:
        _, c, r = d
        return star_distance(value, c) < r

    def _ball_arm_trace(self, d, arm: int) -> Fiv | None:
        """Trace of a ball on one arm as a flagged subinterval of [0,1]."""
        _, c, r = d
        if c == INF:
            hi = r - Fraction(1, 2 ** arm)
        else:
            n, x = c
            if n == arm:
                f = (max(x - r, Fraction(0)), 1 if x - r >= 0 else 0,
                     min(x + r, Fraction(1)), 1 if x + r <= 1 else 0)
                return f if fiv_nonempty(f) else None
            hi = r - x - Fraction(1, 2 ** n) - Fraction(1, 2 ** arm)
        if hi <= 0:
            return None
        return (Fraction(0), 0, min(hi, Fraction(1)), 1 if hi <= 1 else 0)

    def _ball_contains_inf(self, d) -> bool:
        _, c, r = d
        return star_distance(INF, c) < r

    # compact descriptions: tuples of ("pt_inf",) and ("seg", n, lo, hi)
    def cdesc_in_basic(self, cdesc, d) -> bool:
        for piece in cdesc:
            if piece == ("pt_inf",):
                if not self._ball_contains_inf(d):
                    return False
            else:
                _, n, lo, hi = piece
                trace = self._ball_arm_trace(d, n)
                if trace is None or not fiv_subset((lo, 0, hi, 0), trace):
                    return False
        return True

    def cdesc_nonempty(self, cdesc) -> bool:
        return bool(cdesc)

    def basic_meets_cdesc(self, d, cdesc) -> bool:
        for piece in cdesc:
            if piece == ("pt_inf",):
                if self._ball_contains_inf(d):
                    return True
            else:
                _, n, lo, hi = piece
                trace = self._ball_arm_trace(d, n)
                if trace is not None and not fiv_disjoint(trace, (lo, 0, hi, 0)):
                    return True
        return False

    def basic_avoids_cdesc(self, d, cdesc) -> bool:
        return not self.basic_meets_cdesc(d, cdesc)

    def make_cdesc(self, pieces) -> tuple:
        has_inf = any(p == ("pt_inf",) for p in pieces)
        by_arm: dict[int, list] = {}
        for p in pieces:
            if p == ("pt_inf",):
                continue
            _, n, lo, hi = p
            lo, hi = max(Fraction(lo), Fraction(0)), min(Fraction(hi), Fraction(1))
            if lo <= hi:
                by_arm.setdefault(n, []).append((lo, hi))
        out: list = [("pt_inf",)] if has_inf else []
        for n in sorted(by_arm):
            merged: list[tuple[Fraction, Fraction]] = []
            for lo, hi in sorted(by_arm[n]):
                if merged and lo <= merged[-1][1]:
                    merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
                else:
                    merged.append((lo, hi))
            out.extend(("seg", n, lo, hi) for lo, hi in merged)
        return tuple(out)

    def cdesc_intersect(self, c1, c2):
        out = []
        inf1 = ("pt_inf",) in c1
        if inf1 and ("pt_inf",) in c2:
            out.append(("pt_inf",))
        for p1 in c1:
            if p1 == ("pt_inf",):
                continue
            for p2 in c2:
                if p2 == ("pt_inf",) or p1[1] != p2[1]:
                    continue
                lo, hi = max(p1[2], p2[2]), min(p1[3], p2[3])
                if lo <= hi:
                    out.append(("seg", p1[1], lo, hi))
        return self.make_cdesc(out)

    def cdesc_union(self, c1, c2):
        return self.make_cdesc(tuple(c1) + tuple(c2))

    def region(self) -> Region:
        return _StarRegion(self)

    def sigma_piece_descs(self):
        return _StarSigma(self)

    def pinch_candidate(self, vdesc) -> bool:
        _, c, r = vdesc
        return c != INF and not self._ball_contains_inf(vdesc)

    def local_pinch(self, vdesc, pdesc):
        if not self.basic_subset(vdesc, pdesc):
            return None
        _, c, r = vdesc
        if c == INF or self._ball_contains_inf(vdesc):
            return None  # neighborhoods of the center have no compact hull
        # a ball missing the center lives entirely on its own arm
        n, x = c
        seg = ("seg", n, max(x - r, Fraction(0)), min(x + r, Fraction(1)))
        if self.cdesc_in_basic((seg,), pdesc):
            return (seg,)
        return None


class _StarSigma:
    """Lazy infinite family: center singleton, then one arm per index."""

    def __getitem__(self, i: int):
        if i == 0:
            return (("pt_inf",),)
        return (("seg", i - 1, Fraction(0), Fraction(1)),)


class _StarRegion(Region):
    def __init__(self, space: StarSpace):
        self.space = space
        self.inf_covered = False
        self.arms: dict[int, FivUnion] = {}
        self.balls: list = []
        self.version = 0

    def add(self, d) -> None:
        self.balls.append(d)
        self.version += 1
        if self.space._ball_contains_inf(d):
            self.inf_covered = True

    def _arm_union(self, n: int) -> FivUnion:
        u = FivUnion()
        for d in self.balls:
            tr = self.space._ball_arm_trace(d, n)
            if tr is not None:
                u.add(tr)
        return u

    def covers_cdesc(self, cdesc) -> bool:
        for piece in cdesc:
            if piece == ("pt_inf",):
                if not self.inf_covered:
                    return False
            else:
                _, n, lo, hi = piece
                if not self._arm_union(n).covers((lo, 0, hi, 0)):
                    return False
        return True


def star_point(space: StarSpace, p) -> PointName:
    if not space.is_point(p):
        raise OutOfSpace(f"{p!r} is not a star point")
    p = p if p == INF else (p[0], Fraction(p[1]))

    def step(t: int):
        out = []
        s = emission_slot(t)
        if s is not None:
            out.append(space.encode_ball(p, Fraction(1, 2 ** s)))
        d = space.decode(t)
        if d is not None and space.point_in_basic(p, d):
            out.append(t)
        return out

    return PointName(space, enumerate_step(step), value=p)


# ---------------------------------------------------------------------------
# One-point compactification of the rationals

class QhatSpace(Space):
    """The rationals plus a point at infinity whose neighborhoods are
    cofinite.  Basic opens: rational-interval traces on Q (even indices)
    and sets {inf} + (Q minus a finite exclusion list) (odd indices)."""

    name = "qhat"

    def __init__(self) -> None:
        self._decode_cache: dict[int, object] = {}
        self.whole_compact_desc = ("all",)

    def decode(self, n: int):
        try:
            return self._decode_cache[n]
        except KeyError:
            pass
        if n % 2 == 0:
            a, b = decode_interval(n // 2)
            d = ("iv", a, b) if a < b else None
        else:
            d = ("cof", decode_rational_set(n // 2))
        self._decode_cache[n] = d
        return d

    def encode_iv(self, a, b) -> int:
        return 2 * encode_interval(a, b)

    def encode_cof(self, excluded) -> int:
        return 2 * encode_rational_set(excluded) + 1

    def basic_subset(self, d1, d2) -> bool:
        k1, k2 = d1[0], d2[0]
        if k1 == "iv" and k2 == "iv":
            return d2[1] <= d1[1] and d1[2] <= d2[2]
        if k1 == "iv" and k2 == "cof":
            # the interval trace avoids every excluded rational
            return all(not (d1[1] < q < d1[2]) for q in d2[1])
        if k1 == "cof" and k2 == "cof":
            return d2[1] <= d1[1]
        return False  # a cofinite basic never fits inside an interval trace

    def basic_disjoint(self, d1, d2) -> bool:
        k1, k2 = d1[0], d2[0]
        if k1 == "iv" and k2 == "iv":
            return d1[2] <= d2[1] or d2[2] <= d1[1]
        # an interval trace contains infinitely many rationals, a cofinite
        # basic excludes finitely many; and two cofinite basics share inf
        return False

    def point_in_basic(self, value, d) -> bool:
        if d[0] == "iv":
            return value != INF and d[1] < value < d[2]
        return value == INF or value not in d[1]

    # compact descriptions: ("all",) | ("fin", frozenset of points)
    # | ("cof", excluded rationals)  (a clopen cofinite basic is compact)
    def cdesc_in_basic(self, cdesc, d) -> bool:
        if cdesc[0] == "fin":
            return all(self.point_in_basic(p, d) for p in cdesc[1])
        if cdesc[0] == "cof":
            return d[0] == "cof" and d[1] <= cdesc[1]
        return d[0] == "cof" and not d[1]  # ("all",) fits only in the full basic

    def cdesc_nonempty(self, cdesc) -> bool:
        if cdesc[0] == "fin":
            return bool(cdesc[1])
        return True

    def basic_meets_cdesc(self, d, cdesc) -> bool:
        kind = cdesc[0]
        if kind == "all":
            return True  # valid basics are nonempty
        if kind == "fin":
            return any(self.point_in_basic(p, d) for p in cdesc[1])
        # cofinite compact: an interval trace keeps infinitely many rationals,
        # and any cofinite basic shares the point at infinity
        return True

    def basic_avoids_cdesc(self, d, cdesc) -> bool:
        if cdesc[0] == "fin":
            return not any(self.point_in_basic(p, d) for p in cdesc[1])
        return False

    def cdesc_intersect(self, c1, c2):
        if c1[0] == "all":
            return c2
        if c2[0] == "all":
            return c1
        if c1[0] == "fin" and c2[0] == "fin":
            return ("fin", c1[1] & c2[1])
        if c1[0] == "cof" and c2[0] == "cof":
            return ("cof", c1[1] | c2[1])
        fin, cof = (c1, c2) if c1[0] == "fin" else (c2, c1)
        return ("fin", frozenset(p for p in fin[1] if p == INF or p not in cof[1]))

    def cdesc_union(self, c1, c2):
        if c1[0] == "all" or c2[0] == "all":
            return ("all",)
        if c1[0] == "fin" and c2[0] == "fin":
            return ("fin", c1[1] | c2[1])
        if c1[0] == "cof" and c2[0] == "cof":
            return ("cof", c1[1] & c2[1])
        fin, cof = (c1, c2) if c1[0] == "fin" else (c2, c1)
        return ("cof", cof[1] - frozenset(p for p in fin[1] if p != INF))

    def basic_intersection_code(self, d1, d2) -> int | None:
        if d1[0] == "iv" and d2[0] == "iv":
            a, b = max(d1[1], d2[1]), min(d1[2], d2[2])
            return self.encode_iv(a, b) if a < b else None
        if d1[0] == "cof" and d2[0] == "cof":
            return self.encode_cof(d1[1] | d2[1])
        return None

    def region(self) -> Region:
        return _QhatRegion(self)

    def sigma_piece_descs(self):
        return (("all",),)

    def pinch_candidate(self, vdesc) -> bool:
        return vdesc[0] == "cof"

    def pinch_target(self, pdesc) -> bool:
        return pdesc[0] == "cof"

    def local_pinch(self, vdesc, pdesc):
        # only cofinite neighborhoods have compact hulls: they are clopen
        if vdesc[0] == "cof" and pdesc[0] == "cof" and self.basic_subset(vdesc, pdesc):
            return ("cof", vdesc[1])
        return None


class _QhatRegion(Region):
    def __init__(self, space: QhatSpace):
        self.space = space
        self.ivs = FivUnion()
        self.has_cof = False
        self.cof_excluded: frozenset = frozenset()
        self.descs: list = []
        self.version = 0

    def add(self, d) -> None:
        self.descs.append(d)
        if d[0] == "iv":
            before = self.ivs.version
            self.ivs.add((d[1], 1, d[2], 1))
            if self.ivs.version != before:
                self.version += 1
        else:
            if self.has_cof:
                new = self.cof_excluded & d[1]
                if new != self.cof_excluded:
                    self.cof_excluded = new
                    self.version += 1
            else:
                self.has_cof = True
                self.cof_excluded = d[1]
                self.version += 1

    def _covers_rational(self, q: Fraction) -> bool:
        if self.has_cof and q not in self.cof_excluded:
            return True
        return self.ivs.covers_point(q)

    def covers_cdesc(self, cdesc) -> bool:
        kind = cdesc[0]
        if kind == "fin":
            return all(
                (self.has_cof if p == INF else self._covers_rational(p))
                for p in cdesc[1]
            )
        if not self.has_cof:
            return False
        leftovers = self.cof_excluded - cdesc[1] if kind == "cof" else self.cof_excluded
        return all(self._covers_rational(q) for q in sorted(leftovers))


STOP = ("STOP",)


def qhat_point_tokens(kind, exclusions: int = 0) -> MonotoneEnumerator:
    """Token stream of a point name: EXCLUDE(q)* then, for a rational point,
    STOP followed by shrinking interval refinements.

    ``kind`` is INF or a rational.  The excluded rationals are the first
    ``exclusions`` distinct rationals in code order different from the
    point itself (for INF, the exclusion list never ends)."""
    if kind == INF:
        def step(t: int):
            return (("EXCLUDE", _nth_distinct_rational(t, None)),)

        return enumerate_step(step)

    q = Fraction(kind)

    def step(t: int):
        if t < exclusions:
            return (("EXCLUDE", _nth_distinct_rational(t, q)),)
        if t == exclusions:
            return (STOP,)
        s = min(t - exclusions, 64)  # refinements below 2**-64 serve nobody
        eps = Fraction(1, 2 ** s)
        return (("INTERVAL", q - eps, q + eps),)

    return enumerate_step(step)


def _nth_distinct_rational(n: int, avoid: Fraction | None) -> Fraction:
    seen: set[Fraction] = set()
    i = 0
    while True:
        q = decode_rational(i)
        i += 1
        if q in seen or q == avoid:
            continue
        seen.add(q)
        if len(seen) == n + 1:
            return q


def qhat_point_name(space: QhatSpace, kind, exclusions: int = 0) -> PointName:
    """Neighborhood name derived from the token stream."""
    tokens = qhat_point_tokens(kind, exclusions)
    excluded: list[Fraction] = []
    state = {"stopped": kind != INF and exclusions == 0, "cursor": 0}
    value = INF if kind == INF else Fraction(kind)

    def step(t: int):
        out = []
        tokens.advance(state["cursor"] + 1)
        for tok in tokens.between(state["cursor"], state["cursor"] + 1):
            if tok[0] == "EXCLUDE":
                excluded.append(tok[1])
            elif tok == STOP:
                state["stopped"] = True
        state["cursor"] += 1
        s = emission_slot(t)
        if s is not None:
            if value == INF:
                out.append(space.encode_cof(frozenset(excluded)))
            elif state["stopped"]:
                eps = Fraction(1, 2 ** s)
                out.append(space.encode_iv(value - eps, value + eps))
        d = space.decode(t)
        if d is not None and space.point_in_basic(value, d):
            # soundness from the name's own data only: a cofinite basic is
            # certified for a rational point once the refinement separates
            # it from the exclusions; interval basics once inside.
            if value == INF:
                if d[0] == "cof" and d[1] <= frozenset(excluded):
                    out.append(t)
            elif state["stopped"]:
                out.append(t)
        return out

    return PointName(space, enumerate_step(step), value=value)
