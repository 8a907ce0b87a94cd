"""Shared brute-force comparison helpers for the finite oracle spaces."""

from __future__ import annotations

from itertools import combinations

from erctopo.oracle import FiniteSpace, lift_finite, oracle_point
from erctopo.sets import (
    closed_from_cdesc,
    compact_from_cdesc,
    located_from_cdesc,
    open_from_fixture,
    overt_from_cdesc,
)


def all_subsets(points):
    return [frozenset(c) for k in range(len(points) + 1)
            for c in combinations(points, k)]


class OracleFixture:
    """One lifted finite space plus every canonical object on it."""

    def __init__(self, fs: FiniteSpace):
        self.fs = fs
        self.space, self.ercs = lift_finite(fs)
        self.points = {p: oracle_point(self.space, p) for p in fs.points}
        self.opens = {o: open_from_fixture(self.space, o)
                      for o in sorted(fs.opens, key=sorted)}
        self.subsets = all_subsets(fs.points)
        self.closed_subsets = [a for a in self.subsets if fs.is_closed(a)]
        self.compacts = {a: compact_from_cdesc(self.space, a) for a in self.subsets}
        self.closeds = {a: closed_from_cdesc(self.space, a)
                        for a in self.closed_subsets}
        self.overts = {a: overt_from_cdesc(self.space, a) for a in self.subsets}
        self.locateds = {a: located_from_cdesc(self.space, a)
                         for a in self.closed_subsets}

    def fresh_open(self, o):
        return open_from_fixture(self.space, o)
