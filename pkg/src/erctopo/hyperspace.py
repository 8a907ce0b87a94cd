"""The hyperspace of located sets: bit specifications, consistency,
translations between located sets and truth sequences, Hausdorffness, and
the universal-quantification search that witnesses its compactness.

A bit specification assigns one bit per basic open: 1 may mean "touched",
0 means "avoided".  Consistency forbids a touched basic from being
formally trapped under a patch whose whole cover is avoided; consistent
specifications are exactly the ones realized by located sets, and the
space of specifications is searched as a finitely branching prefix tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .ercs import Ercs
from .kernel import (
    Machine,
    MonotoneEnumerator,
    SemidecisionProcess,
    any_accepts,
    enumerate_step,
)
from .sets import (
    ClosedSet,
    CompactSet,
    LocatedSet,
    OpenSet,
    OvertSet,
    compact_subset,
    not_subset,
)
from .spaces import Space


# ---------------------------------------------------------------------------
# Bit specifications

class SpecBits:
    """A total deterministic bit per basic index."""

    def __init__(self, bit: Callable[[int], int]):
        self._bit = bit
        self._memo: dict[int, int] = {}

    def bit(self, n: int) -> int | None:
        try:
            return self._memo[n]
        except KeyError:
            b = self._bit(n)
            self._memo[n] = b
            return b


def realized_bits(space: Space, cdesc) -> SpecBits:
    """The specification of an exactly described set: a basic gets bit 1
    exactly when it intersects the set (invalid indices get 0)."""

    def bit(n: int) -> int:
        d = space.decode(n)
        return 1 if d is not None and space.basic_meets_cdesc(d, cdesc) else 0

    return SpecBits(bit)


def flipped_bits(base: SpecBits, overrides: dict[int, int]) -> SpecBits:
    over = dict(overrides)
    return SpecBits(lambda n: over[n] if n in over else base.bit(n))


class PrefixBits:
    """A finite partial assignment; unassigned indices answer None."""

    def __init__(self, assigned: Sequence[int], indices: Sequence[int]):
        self._map = dict(zip(indices, assigned))

    def bit(self, n: int) -> int | None:
        return self._map.get(n)

    def known(self) -> dict[int, int]:
        return dict(self._map)


# ---------------------------------------------------------------------------
# Consistency

@dataclass(frozen=True)
class ConsistencyCondition:
    n: int
    kid: int
    cover: frozenset


class _RefuteMachine(Machine):
    """Enumerates conditions (touched basic below a patch, patch cover) and
    accepts at the first one whose cover is entirely avoided.

    A refuting cover consists of avoided basics only, so its union sits
    inside the union of all avoided basics; a patch is therefore eligible
    only once the avoided region provably covers it.  Cover streams are
    advanced for eligible patches alone, which keeps runs over realized
    (never refutable) specifications linear.
    """

    RECHECK_GRAIN = 16

    def __init__(self, e: Ercs, bits):
        super().__init__()
        self.e = e
        self.bits = bits
        self.condition: ConsistencyCondition | None = None
        self._kid_ns: dict[int, list[int]] = {}
        self._pending: list[int] = []
        self._active: list[int] = []
        self._kid_cursor: dict[int, int] = {}
        self._rr = 0
        self._zero_region = e.space.region()
        self._u_cursor = 0
        self._checked_version = -1
        self._next_recheck = 0

    def _check_cover(self, kid: int, cover: frozenset) -> bool:
        if any(self.bits.bit(i) != 0 for i in cover):
            return False
        n = self._kid_ns[kid][0]
        self.condition = ConsistencyCondition(n, kid, cover)
        return True

    def _eligible(self, kid: int) -> bool:
        cdesc = self.e.compact_cdesc(kid)
        return cdesc is not None and self._zero_region.covers_cdesc(cdesc)

    def _advance_kid(self, kid: int, steps: int) -> bool:
        covers = self.e.compact_value(kid).covers
        cur = self._kid_cursor[kid]
        covers.advance(cur + steps)
        for cover in covers.between(cur, cur + steps):
            if self._check_cover(kid, cover):
                return True
        self._kid_cursor[kid] = cur + steps
        return False

    def step(self, t: int) -> bool:
        for n, kid in self.e.r_stream.between(t, t + 1):
            if self.bits.bit(n) == 1:
                if kid not in self._kid_ns:
                    self._kid_ns[kid] = [n]
                    self._kid_cursor[kid] = 0
                    if self._eligible(kid):
                        self._active.append(kid)
                        if self._advance_kid(kid, 24):
                            return True
                    else:
                        self._pending.append(kid)
                else:
                    self._kid_ns[kid].append(n)
        self.e.u_stream.advance(self._u_cursor + 1)
        for u in self.e.u_stream.between(self._u_cursor, self._u_cursor + 1):
            if self.bits.bit(u) == 0:
                self._zero_region.add(self.e.space.decode(u))
        self._u_cursor += 1
        quiet = (self.e.r_stream.quiescent(t + 1)
                 and self.e.u_stream.quiescent(t + 1))
        due = (self._zero_region.version != self._checked_version
               and t >= self._next_recheck)
        if self._pending and (quiet or due):
            self._checked_version = self._zero_region.version
            self._next_recheck = t + max(self.RECHECK_GRAIN, t // 8)
            still = []
            for kid in self._pending:
                if self._eligible(kid):
                    self._active.append(kid)
                    if self._advance_kid(kid, 24):
                        return True
                else:
                    still.append(kid)
            self._pending = still
        if self._active:
            self._rr %= len(self._active)
            kid = self._active[self._rr]
            self._rr += 1
            if self._advance_kid(kid, 1):
                return True
            if self.e.compact_value(kid).covers.stalled:
                self._active.remove(kid)
        elif quiet:
            # pending patches were just rechecked against the frozen region
            self.stall()
        return False


def consistency_refute(e: Ercs, bits, fuel: int) -> ConsistencyCondition | None:
    """First refuting condition found within the budget, or None.

    ``bits`` may be partial (None for unknown); only conditions whose bits
    are all known are used, so a refutation is sound for every extension.
    A returned condition certifies that no located set realizes the bits.
    """
    machine = _RefuteMachine(e, bits)
    if machine.poll(fuel) is None:
        return None
    return machine.condition


# ---------------------------------------------------------------------------
# Located sets from specifications

class _PositiveHits(MonotoneEnumerator[int]):
    """Basics certified to intersect the specified set: some touched basic
    is formally below a patch that fits inside the queried basic.

    Positivity of an index may be revealed over time (truth sequences);
    formal pairs seen before their basic turned positive are retried
    whenever the supplied version counter moves.
    """

    def __init__(self, e: Ercs, positive: Callable[[int], bool],
                 version: Callable[[], int] = lambda: 0):
        super().__init__()
        self.e = e
        self.space = e.space
        self.positive = positive
        self.version = version
        self._kid_index = self.space.cdesc_inside_index()
        self._kids_seen: set[int] = set()
        self._dormant: list[tuple[int, int]] = []
        self._pending: list[int] = []
        self._pending_set: set[int] = set()
        self._u_cursor = 0
        self._seen_version = 0

    def _activate(self, kid: int) -> bool:
        if kid in self._kids_seen:
            return False
        self._kids_seen.add(kid)
        cdesc = self.e.compact_cdesc(kid)
        if cdesc is None:
            return False
        self._kid_index.add(cdesc)
        return True

    def step(self, t: int):
        out = []
        sp = self.space
        fresh_kid = False
        for n, kid in self.e.r_stream.between(t, t + 1):
            if self.positive(n):
                fresh_kid |= self._activate(kid)
            else:
                self._dormant.append((n, kid))
        v = self.version()
        if v != self._seen_version:
            self._seen_version = v
            still = []
            for n, kid in self._dormant:
                if self.positive(n):
                    fresh_kid |= self._activate(kid)
                else:
                    still.append((n, kid))
            self._dormant = still
        self.e.u_stream.advance(self._u_cursor + 1)
        for u in self.e.u_stream.between(self._u_cursor, self._u_cursor + 1):
            d = sp.decode(u)
            if self._kid_index.some_inside(d):
                out.append(u)
            elif u not in self._pending_set:
                self._pending.append(u)
                self._pending_set.add(u)
        self._u_cursor += 1
        if fresh_kid and self._pending:
            still = []
            for u in self._pending:
                if self._kid_index.some_inside(sp.decode(u)):
                    out.append(u)
                    self._pending_set.discard(u)
                else:
                    still.append(u)
            self._pending = still
        if (self.e.r_stream.quiescent(t + 1)
                and self.e.u_stream.quiescent(self._u_cursor)
                and self.quiet_positivity()):
            self.stall()
        return out

    def quiet_positivity(self) -> bool:
        return True


def located_from_spec(e: Ercs, bits: SpecBits) -> LocatedSet:
    """The located set realizing a consistent specification.

    The complement collects every avoided basic; the overt side certifies
    hits through touched basics formally below patches inside the query.
    Refutable inputs yield a pair that fails coherence at some stage.
    """

    def co_step(t: int):
        d = e.space.decode(t)
        if d is not None and bits.bit(t) == 0:
            return (t,)
        return ()

    complement = OpenSet(e.space,
                         enumerate_step(co_step,
                                        stall_after=e.space.finite_basic_count),
                         label="spec-complement")
    hits = _PositiveHits(e, lambda n: bits.bit(n) == 1)
    return LocatedSet(ClosedSet(complement), OvertSet(e.space, hits))


# ---------------------------------------------------------------------------
# Truth sequences

class TruthSequence:
    """Per-index three-valued observations driven by one shared machine.

    ``entry(n, fuel)`` returns ("one", stage), ("zero", stage) or None;
    once an index resolves it never changes or flips.
    """

    def __init__(self, driver: "_TruthDriver"):
        self._driver = driver

    def entry(self, n: int, fuel: int):
        self._driver.register(n)
        self._driver.drive(fuel)
        got = self._driver.marks.get(n)
        if got is not None and got[1] < fuel:
            return got
        return None


class _TruthDriver:
    """Shared evaluation of the embedding of a located set into truth
    sequences: index n resolves to one when the overt part certifiably
    meets its basic, to zero when some patch above it certifiably misses
    the set."""

    def __init__(self, e: Ercs, a: LocatedSet):
        self.e = e
        self.a = a
        self.space = e.space
        self.marks: dict[int, tuple[str, int]] = {}
        self.zero_log: list[int] = []
        self.one_version = 0
        self._stage = 0
        self._hit_index = self.space.basic_inside_index()
        self._hits_version = 0
        self._region = self.space.region()
        self._region_version = -1
        self._kids_of: dict[int, list[int]] = {}
        self._registered: list[int] = []
        self._registered_set: set[int] = set()
        self._unresolved: set[int] = set()

    def register(self, n: int) -> None:
        if n in self._registered_set:
            return
        self._registered_set.add(n)
        self._registered.append(n)
        if self.space.decode(n) is None:
            return
        self._unresolved.add(n)
        # replay the stream prefix consumed before this index existed
        for m, kid in self.e.r_stream.listing(self._stage):
            if m == n:
                self._kids_of.setdefault(n, []).append(kid)
        d = self.space.decode(n)
        t = max(self._stage - 1, 0)
        if self._hit_index.some_inside(d):
            self._mark(n, "one", t)
        else:
            for kid in self._kids_of.get(n, ()):
                if self._kid_avoids(kid):
                    self._mark(n, "zero", t)
                    break

    def drive(self, fuel: int) -> None:
        while self._stage < fuel and not self.quiescent():
            t = self._stage
            self._stage += 1
            self._step(t)

    def quiescent(self) -> bool:
        s = self._stage
        return (self.a.overt_part.hits.quiescent(s)
                and self.a.closed_part.complement.parts.quiescent(s)
                and self.e.r_stream.quiescent(s)
                and self.e.u_stream.quiescent(s))

    def _mark(self, n: int, value: str, t: int) -> None:
        if n not in self.marks:
            self.marks[n] = (value, t)
            self._unresolved.discard(n)
            if value == "zero":
                self.zero_log.append(n)
            else:
                self.one_version += 1

    def _step(self, t: int) -> None:
        sp = self.space
        new_hits = self.a.overt_part.hits.between(t, t + 1)
        for h in new_hits:
            self._hit_index.add(sp.decode(h))
        new_parts = self.a.closed_part.complement.parts.between(t, t + 1)
        for p in new_parts:
            self._region.add(sp.decode(p))
        for n, kid in self.e.r_stream.between(t, t + 1):
            if n in self._registered_set:
                self._kids_of.setdefault(n, []).append(kid)
                if n in self._unresolved and self._kid_avoids(kid):
                    self._mark(n, "zero", t)
        region_changed = self._region.version != self._region_version
        self._region_version = self._region.version
        for n in sorted(self._unresolved) if (new_hits or region_changed) else ():
            d = sp.decode(n)
            if new_hits and self._hit_index.some_inside(d):
                self._mark(n, "one", t)
            elif region_changed:
                for kid in self._kids_of.get(n, ()):
                    if self._kid_avoids(kid):
                        self._mark(n, "zero", t)
                        break

    def _kid_avoids(self, kid: int) -> bool:
        cdesc = self.e.compact_cdesc(kid)
        return cdesc is not None and self._region.covers_cdesc(cdesc)


def spec_from_located(e: Ercs, a: LocatedSet) -> TruthSequence:
    return TruthSequence(_TruthDriver(e, a))


def located_from_truth(e: Ercs, t: TruthSequence) -> LocatedSet:
    """Inverse translation: the complement collects the zero-resolved
    basics; hits are certified through one-resolved basics below patches."""
    driver = t._driver

    class _CoParts(MonotoneEnumerator[int]):
        def __init__(self) -> None:
            super().__init__()
            self._u_cursor = 0
            self._log_cursor = 0

        def step(self, s: int):
            driver.e.u_stream.advance(self._u_cursor + 1)
            for u in driver.e.u_stream.between(self._u_cursor, self._u_cursor + 1):
                driver.register(u)
            self._u_cursor += 1
            driver.drive(s + 1)
            out = driver.zero_log[self._log_cursor:]
            self._log_cursor = len(driver.zero_log)
            if (driver.quiescent()
                    and driver.e.u_stream.quiescent(self._u_cursor)):
                self.stall()
            return out

    def positive(n: int) -> bool:
        driver.register(n)
        got = driver.marks.get(n)
        return got is not None and got[0] == "one"

    hits = _PositiveHits(e, positive, version=lambda: driver.one_version)
    hits.quiet_positivity = driver.quiescent

    class _DrivenHits(MonotoneEnumerator[int]):
        def step(self, s: int):
            driver.drive(s + 1)
            hits.advance(s + 1)
            out = hits.between(s, s + 1)
            if hits.stalled:
                self.stall()
            return out

    return LocatedSet(ClosedSet(OpenSet(e.space, _CoParts(), label="truth-co")),
                      OvertSet(e.space, _DrivenHits()))


# ---------------------------------------------------------------------------
# Hausdorffness

def located_not_equal(a: LocatedSet, b: LocatedSet) -> SemidecisionProcess:
    """Semidecides inequality: one set escapes the other's closed name."""
    return any_accepts(not_subset(a.overt_part, b.closed_part),
                       not_subset(b.overt_part, a.closed_part))


# ---------------------------------------------------------------------------
# Universal quantification over located sets

class PrefixOracle:
    """Bit access handed to open predicates during the tree search."""

    def __init__(self, assigned: tuple[int, ...], indices: tuple[int, ...]):
        self.assigned = assigned
        self.indices = indices
        self._map = dict(zip(indices, assigned))

    def bit(self, n: int) -> int | None:
        return self._map.get(n)

    def zero_indices(self) -> tuple[int, ...]:
        return tuple(i for i, b in zip(self.indices, self.assigned) if b == 0)

    def one_indices(self) -> tuple[int, ...]:
        return tuple(i for i, b in zip(self.indices, self.assigned) if b == 1)


class ForallSearch(Machine):
    """Depth-first prefix-tree search with iterative deepening.

    A branch closes when the predicate accepts on its prefix (sound for
    all extensions by monotonicity) or when the prefix alone is refuted
    (no consistent extension).  The search accepts when every branch of
    some finite depth closes; ``closing_depth`` reports how deep it went.
    """

    def __init__(self, e: Ercs, predicate):
        super().__init__()
        self.e = e
        self.predicate = predicate  # PrefixOracle -> SemidecisionProcess
        self.closing_depth: int | None = None
        self._indices: list[int] = []
        self._index_cursor = 0
        self._round = 0
        self._node_fuel = 0
        self._depth_limit = 0
        self._stack: list[tuple[int, ...]] = []
        self._machines: dict[tuple[int, ...], tuple] = {}
        self._closed: set[tuple[int, ...]] = set()
        self._max_depth_seen = 0

    def _valid_index(self, k: int) -> int | None:
        while len(self._indices) <= k:
            if (self.e.space.finite_basic_count is not None
                    and self._index_cursor >= self.e.space.finite_basic_count):
                return None
            if self.e.space.decode(self._index_cursor) is not None:
                self._indices.append(self._index_cursor)
            self._index_cursor += 1
        return self._indices[k]

    def _node(self, prefix: tuple[int, ...]):
        got = self._machines.get(prefix)
        if got is None:
            indices = tuple(self._indices[: len(prefix)])
            oracle = PrefixOracle(prefix, indices)
            refute = _RefuteMachine(self.e, oracle)
            accept = self.predicate(oracle)
            got = (accept, refute, [0])
            self._machines[prefix] = got
        return got

    def _start_round(self) -> None:
        self._round += 1
        self._depth_limit = self._round
        self._node_fuel = 8 * self._round
        self._stack = [()]
        self._max_depth_seen = 0

    def step(self, t: int) -> bool:
        if not self._stack:
            self._start_round()
        prefix = self._stack[-1]
        self._max_depth_seen = max(self._max_depth_seen, len(prefix))
        if prefix in self._closed:
            self._stack.pop()
            if not self._stack:
                self.closing_depth = self._max_depth_seen
                return True
            return False
        accept, refute, fuel_box = self._node(prefix)
        fuel_box[0] += 1
        fuel = fuel_box[0]
        if accept.poll(fuel) is not None or refute.poll(fuel) is not None:
            self._closed.add(prefix)
            return False
        if fuel < self._node_fuel:
            return False
        # fuel for this node is spent at the current round
        if len(prefix) < self._depth_limit:
            depth = len(prefix)
            if self._valid_index(depth) is None:
                # no further basics: the prefix is total; abandon the round
                self._stack = []
                return False
            self._stack.pop()
            self._stack.append(prefix + (1,))
            self._stack.append(prefix + (0,))
            return False
        self._stack = []  # depth limit hit: deepen and retry
        return False


def forall_located(e: Ercs, predicate) -> ForallSearch:
    """Semidecides that an open predicate holds for every located set.

    The predicate maps a PrefixOracle to a semidecision process, monotone
    in both revealed bits and fuel; acceptance of the search implies the
    predicate holds on every located set of the space.
    """
    return ForallSearch(e, predicate)


# ---------------------------------------------------------------------------
# Open predicates for the search (and the command-line surface)

def subset_predicate(e: Ercs, outside_compact: CompactSet):
    """P(A): A avoids the given compact outside-region, i.e. A is included
    in the open set whose complement the region covers: certified when the
    avoided basics swallow the region."""

    def build(oracle: PrefixOracle) -> SemidecisionProcess:
        zeros = oracle.zero_indices()

        class _ZeroUnion(MonotoneEnumerator[int]):
            def step(self, t: int):
                if t < len(zeros):
                    return (zeros[t],)
                self.stall()
                return ()

        return compact_subset(outside_compact,
                              OpenSet(e.space, _ZeroUnion(), label="zero-bits"))

    return build


def meets_predicate(e: Ercs, u: OpenSet):
    """P(A): A intersects the open set: certified by a touched basic below
    a patch inside it."""

    def build(oracle: PrefixOracle) -> SemidecisionProcess:
        ones = set(oracle.one_indices())

        class _Meets(Machine):
            def __init__(self) -> None:
                super().__init__()
                self._region = e.space.region()
                self._region_version = -1
                self._kids: list[int] = []

            def step(self, t: int) -> bool:
                for p in u.parts.between(t, t + 1):
                    self._region.add(e.space.decode(p))
                for n, kid in e.r_stream.between(t, t + 1):
                    if n in ones:
                        self._kids.append(kid)
                        if self._kid_in(kid):
                            return True
                if self._region.version != self._region_version:
                    self._region_version = self._region.version
                    return any(self._kid_in(k) for k in self._kids)
                return False

            def _kid_in(self, kid: int) -> bool:
                cdesc = e.compact_cdesc(kid)
                return cdesc is not None and self._region.covers_cdesc(cdesc)

        return _Meets()

    return build


def empty_or_predicate(e: Ercs, whole: CompactSet, inner):
    """P(A): A is empty (the avoided basics cover the space) or the inner
    predicate holds."""
    empty_side = subset_predicate(e, whole)

    def build(oracle: PrefixOracle) -> SemidecisionProcess:
        return any_accepts(empty_side(oracle), inner(oracle))

    return build


def and_predicate(*parts):
    def build(oracle: PrefixOracle) -> SemidecisionProcess:
        from .kernel import both_accept
        procs = [p(oracle) for p in parts]
        out = procs[0]
        for q in procs[1:]:
            out = both_accept(out, q)
        return out

    return build


def or_predicate(*parts):
    def build(oracle: PrefixOracle) -> SemidecisionProcess:
        return any_accepts(*[p(oracle) for p in parts])

    return build
