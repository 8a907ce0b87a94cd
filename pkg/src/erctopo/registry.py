"""Named space registry: descriptors plus whatever structure each carries.

The rational line, the unit interval and Cantor space come with a
relatively compact system; the star space and the one-point
compactification of the rationals deliberately do not (they are the
negative fixtures).  ``finite:{...}`` literals build exhaustively checked
finite metric spaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ercs import Ercs, cantor_ercs, interval_ercs
from .oracle import MalformedSpace, lift_finite, parse_finite_literal
from .sets import CompactSet, compact_from_cdesc
from .spaces import (
    CantorSpace,
    LineSpace,
    MalformedLiteral,
    MetricStructure,
    QhatSpace,
    Space,
    StarSpace,
    UnitIntervalSpace,
    UnknownSpace,
    encode_interval,
    word_rank,
)


@dataclass
class SpaceBundle:
    space: Space
    metric: MetricStructure | None
    ercs: Ercs | None
    whole_hint: tuple | None  # patch ids covering the space, when compact

    def whole_compact(self) -> CompactSet | None:
        if self.space.whole_compact_desc is None:
            return None
        return compact_from_cdesc(self.space, self.space.whole_compact_desc)


_CACHE: dict[str, SpaceBundle] = {}


def registry_get(name: str) -> SpaceBundle:
    """Look up a registered space by name.

    Raises UnknownSpace for unregistered names and MalformedLiteral for a
    bad ``finite:{...}`` literal.
    """
    if name in _CACHE:
        return _CACHE[name]
    if name.startswith("finite:"):
        try:
            fs = parse_finite_literal(name[len("finite:"):])
        except MalformedSpace as exc:
            raise MalformedLiteral(str(exc)) from exc
        space, ercs = lift_finite(fs)
        full_kid = 2 ** len(fs.points) - 2
        bundle = SpaceBundle(space, space.metric, ercs, (full_kid,))
    elif name == "real-line":
        space = LineSpace()
        bundle = SpaceBundle(space, space.metric, interval_ercs(space), None)
    elif name == "unit-interval":
        space = UnitIntervalSpace()
        bundle = SpaceBundle(space, space.metric, interval_ercs(space),
                             (encode_interval(Fraction(-1), Fraction(2)),))
    elif name == "cantor":
        space = CantorSpace()
        bundle = SpaceBundle(space, None, cantor_ercs(space), (word_rank(""),))
    elif name == "star":
        space = StarSpace()
        bundle = SpaceBundle(space, space.metric, None, None)
    elif name == "qhat":
        space = QhatSpace()
        bundle = SpaceBundle(space, None, None, None)
    else:
        raise UnknownSpace(f"no registered space named {name!r}")
    _CACHE[name] = bundle
    return bundle
