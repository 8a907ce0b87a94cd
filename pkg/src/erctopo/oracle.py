"""Finite spaces with exhaustive reference semantics.

Every generic algorithm in this library is checked against these oracles:
a finite space enumerates everything, so membership, containment, overlap,
distances and quantification over subsets are all decidable by brute
force.  Spaces are given either by an explicit topology (a base, closed
under nothing in particular) or by a finite rational metric, in which case
the induced topology is discrete and the base is every nonempty subset.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .ercs import Ercs
from .kernel import enumerate_list
from .sets import LocatedSet, located_from_cdesc
from .spaces import MetricStructure, OutOfSpace, PointName, Region, Space


class MalformedSpace(Exception):
    pass


class EmptySetArgument(Exception):
    pass


class FiniteSpace:
    """Point set plus either a metric table or an explicit base of opens."""

    def __init__(self, points: Sequence[str],
                 metric: dict[tuple[str, str], Fraction] | None = None,
                 base: Sequence[frozenset] | None = None,
                 name: str = "finite"):
        if len(set(points)) != len(points) or not points:
            raise MalformedSpace("points must be distinct and nonempty")
        self.points = tuple(points)
        self.name = name
        if metric is not None:
            self.metric_table = dict(metric)
            for p, q in combinations(points, 2):
                d = self.metric_table.get((p, q), self.metric_table.get((q, p)))
                if d is None:
                    raise MalformedSpace(f"distance d({p},{q}) unspecified")
                if d <= 0:
                    raise MalformedSpace("distances must be positive")
                self.metric_table[(p, q)] = self.metric_table[(q, p)] = Fraction(d)
            for p in points:
                self.metric_table[(p, p)] = Fraction(0)
            for p in points:
                for q in points:
                    for r in points:
                        if (self.metric_table[(p, r)]
                                > self.metric_table[(p, q)] + self.metric_table[(q, r)]):
                            raise MalformedSpace("triangle inequality violated")
            # discrete topology: every nonempty subset is a basic open
            self.base = tuple(frozenset(c)
                              for k in range(1, len(points) + 1)
                              for c in combinations(points, k))
        else:
            if base is None:
                raise MalformedSpace("need a metric or an explicit base")
            self.metric_table = None
            pts = frozenset(points)
            cleaned = []
            for b in base:
                fb = frozenset(b)
                if not fb <= pts:
                    raise MalformedSpace(f"basic {sorted(b)} uses unknown points")
                if fb and fb not in cleaned:
                    cleaned.append(fb)
            self.base = tuple(cleaned)
        self.opens = self._close_under_union()

    def _close_under_union(self) -> frozenset:
        if self.metric_table is not None:
            # discrete: every subset is open
            return frozenset(frozenset(c)
                             for k in range(len(self.points) + 1)
                             for c in combinations(self.points, k))
        opens = {frozenset()}
        frontier = [frozenset()]
        while frontier:
            cur = frontier.pop()
            for b in self.base:
                u = cur | b
                if u not in opens:
                    opens.add(u)
                    frontier.append(u)
        return frozenset(opens)

    def distance(self, p: str, q: str) -> Fraction:
        if self.metric_table is None:
            raise MalformedSpace("space has no metric")
        return self.metric_table[(p, q)]

    def closure(self, a: frozenset) -> frozenset:
        pts = frozenset(self.points)
        interior_of_complement = frozenset().union(
            *[b for b in self.base if b <= pts - a]) if a != pts else frozenset()
        return pts - interior_of_complement

    def is_closed(self, a: Iterable[str]) -> bool:
        return self.closure(frozenset(a)) == frozenset(a)


class OracleSpace(Space):
    """A finite space lifted to the generic interface; everything exact."""

    def __init__(self, fs: FiniteSpace):
        self.fs = fs
        self.name = fs.name
        self.finite_basic_count = len(fs.base)
        if fs.metric_table is not None:
            pts = fs.points
            self.metric = MetricStructure(
                self,
                dense=lambda i: pts[i % len(pts)],
                dense_index=lambda p: pts.index(p),
                exact=fs.distance,
            )
        self.whole_compact_desc = frozenset(fs.points)

    def decode(self, n: int):
        return self.fs.base[n] if 0 <= n < len(self.fs.base) else None

    def basic_subset(self, d1, d2) -> bool:
        return d1 <= d2

    def basic_disjoint(self, d1, d2) -> bool:
        return not (d1 & d2)

    def point_in_basic(self, value, d) -> bool:
        return value in d

    def cdesc_in_basic(self, cdesc, d) -> bool:
        return cdesc <= d

    def cdesc_nonempty(self, cdesc) -> bool:
        return bool(cdesc)

    def basic_meets_cdesc(self, d, cdesc) -> bool:
        return bool(d & cdesc)

    def basic_avoids_cdesc(self, d, cdesc) -> bool:
        return not (d & cdesc)

    def cdesc_intersect(self, c1, c2):
        return c1 & c2

    def cdesc_union(self, c1, c2):
        return c1 | c2

    def region(self) -> Region:
        return _OracleRegion()

    def sigma_piece_descs(self):
        return (frozenset(self.fs.points),)

    def local_pinch(self, vdesc, pdesc):
        if vdesc <= pdesc:
            return frozenset(vdesc)  # every subset of a finite space is compact
        return None

    def make_cdesc(self, points) -> frozenset:
        return frozenset(points)


class _OracleRegion(Region):
    def __init__(self) -> None:
        self.union: set = set()
        self.version = 0

    def add(self, desc) -> None:
        if not desc <= self.union:
            self.union |= desc
            self.version += 1

    def covers_cdesc(self, cdesc) -> bool:
        return cdesc <= self.union


def oracle_point(space: OracleSpace, p: str) -> PointName:
    if p not in space.fs.points:
        raise OutOfSpace(f"{p!r} is not a point of {space.name}")
    listing = [n for n in range(len(space.fs.base)) if p in space.fs.base[n]]
    return PointName(space, enumerate_list(listing), value=p)


def lift_finite(fs: FiniteSpace):
    """Space, ercs and (when metric) metric structure for a finite space.

    The patches are all nonempty subsets (every subset of a finite space is
    compact); formal containment is exact containment of a basic in a patch.
    """
    space = OracleSpace(fs)
    pts = fs.points
    subsets = [frozenset(c) for k in range(1, len(pts) + 1)
               for c in combinations(pts, k)]

    def cdesc(kid: int):
        return subsets[kid]

    pairs = [(n, kid)
             for n in range(len(fs.base))
             for kid in range(len(subsets))
             if fs.base[n] <= subsets[kid]]

    ercs = Ercs(space, space.all_basics(),
                enumerate_list(list(range(len(subsets)))),
                enumerate_list(pairs), cdesc)
    return space, ercs


# ---------------------------------------------------------------------------
# finite:{...} literals

_LITERAL = re.compile(r"^\{(?P<pts>[^;{}]*)(;(?P<rest>.*))?\}$", re.S)


def parse_finite_literal(text: str) -> FiniteSpace:
    """Grammar: ``{p1,...,pk; d(pi,pj)=r, ...}`` with exact rational r.

    The symmetric closure is applied; a missing distance is an error.
    """
    m = _LITERAL.match(text.strip())
    if not m:
        raise MalformedSpace(f"bad finite-space literal: {text!r}")
    points = [p.strip() for p in m.group("pts").split(",") if p.strip()]
    if not points:
        raise MalformedSpace("finite-space literal lists no points")
    rest = (m.group("rest") or "").strip()
    metric: dict[tuple[str, str], Fraction] = {}
    if rest:
        items, depth, cur = [], 0, []
        for ch in rest:
            if ch == "," and depth == 0:
                items.append("".join(cur))
                cur = []
                continue
            depth += ch == "("
            depth -= ch == ")"
            cur.append(ch)
        items.append("".join(cur))
        for item in items:
            item = item.strip()
            if not item:
                continue
            dm = re.match(r"^d\(([^,()]+),([^,()]+)\)=(.+)$", item)
            if not dm:
                raise MalformedSpace(f"bad distance clause: {item!r}")
            p, q, val = dm.group(1).strip(), dm.group(2).strip(), dm.group(3).strip()
            if p not in points or q not in points:
                raise MalformedSpace(f"distance clause names unknown point: {item!r}")
            try:
                metric[(p, q)] = Fraction(val)
            except (ValueError, ZeroDivisionError) as exc:
                raise MalformedSpace(f"bad rational {val!r}") from exc
    return FiniteSpace(points, metric=metric, name=f"finite:{{{','.join(points)}}}")


# ---------------------------------------------------------------------------
# Brute-force reference operations

def brute_located(fs: FiniteSpace):
    """All closed subsets as located sets (on discrete spaces: all subsets)."""
    space = OracleSpace(fs)
    out: list[LocatedSet] = []
    for k in range(len(fs.points) + 1):
        for combo in combinations(fs.points, k):
            a = frozenset(combo)
            if fs.is_closed(a):
                out.append(located_from_cdesc(space, a))
    return out


def brute_closed_subsets(fs: FiniteSpace) -> list[frozenset]:
    return [frozenset(c)
            for k in range(len(fs.points) + 1)
            for c in combinations(fs.points, k)
            if fs.is_closed(frozenset(c))]


def brute_forall(fs: FiniteSpace, predicate) -> bool:
    """Truth of: every closed subset (the located family) satisfies the
    set-level predicate."""
    return all(predicate(a) for a in brute_closed_subsets(fs))


def brute_distance(fs: FiniteSpace, x: str, a: Iterable[str]) -> Fraction:
    a = list(a)
    if not a:
        raise EmptySetArgument("distance to the empty set is undefined")
    return min(fs.distance(x, p) for p in a)


# Handy prebuilt oracle fixtures: at most 4 points each.

def standard_oracle_spaces() -> list[FiniteSpace]:
    spaces: list[FiniteSpace] = []
    spaces.append(FiniteSpace(["a"], metric={}, name="finite:point"))
    spaces.append(FiniteSpace(["a", "b"],
                              metric={("a", "b"): Fraction(1)},
                              name="finite:pair"))
    spaces.append(FiniteSpace(["a", "b"],
                              metric={("a", "b"): Fraction(1, 3)},
                              name="finite:near-pair"))
    spaces.append(FiniteSpace(["a", "b", "c"],
                              metric={("a", "b"): Fraction(1),
                                      ("a", "c"): Fraction(1),
                                      ("b", "c"): Fraction(1)},
                              name="finite:triangle"))
    spaces.append(FiniteSpace(["a", "b", "c"],
                              metric={("a", "b"): Fraction(1, 2),
                                      ("a", "c"): Fraction(1),
                                      ("b", "c"): Fraction(3, 4)},
                              name="finite:scalene"))
    spaces.append(FiniteSpace(["a", "b", "c", "d"],
                              metric={("a", "b"): Fraction(1),
                                      ("a", "c"): Fraction(2),
                                      ("a", "d"): Fraction(2),
                                      ("b", "c"): Fraction(2),
                                      ("b", "d"): Fraction(2),
                                      ("c", "d"): Fraction(1)},
                              name="finite:two-pairs"))
    # explicit (non-discrete) topologies
    spaces.append(FiniteSpace(["0", "1"], base=[frozenset("1"), frozenset("01")],
                              name="finite:sierpinski"))
    spaces.append(FiniteSpace(["0", "1", "2"],
                              base=[frozenset("0"), frozenset("01"), frozenset("012")],
                              name="finite:chain"))
    spaces.append(FiniteSpace(["0", "1", "2"],
                              base=[frozenset("0"), frozenset("2"),
                                    frozenset("012")],
                              name="finite:wedge"))
    spaces.append(FiniteSpace(["0", "1", "2", "3"],
                              base=[frozenset("01"), frozenset("23"),
                                    frozenset("1"), frozenset("3")],
                              name="finite:two-blobs"))
    return spaces
