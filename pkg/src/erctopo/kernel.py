"""Fuel discipline, semidecision processes and stage-indexed enumerations.

Everything observable in this library is built from two primitives:

* a ``SemidecisionProcess`` -- a deterministic computation that, given a
  finite fuel budget, either reports ``Accepted(stage)`` or ``Pending``.
  Acceptance is monotone in fuel and the reported stage never increases.
  Running out of fuel is an ordinary ``Pending`` outcome, never an error.

* a ``MonotoneEnumerator`` -- a stage-indexed growing listing.  The listing
  at stage ``s`` is always a prefix of the listing at stage ``s + 1``.

Both are pure functions of their stage/fuel argument; internal caches only
memoize work that has already been performed, so repeated evaluation is
cheap and replayable.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from math import isqrt
from typing import Callable, Generic, Iterable, Sequence, TypeVar

T = TypeVar("T")
U = TypeVar("U")


# ---------------------------------------------------------------------------
# Pairing

def pair(i: int, j: int) -> int:
    """Cantor pairing; a bijection between N x N and N."""
    s = i + j
    return s * (s + 1) // 2 + j


def unpair(n: int) -> tuple[int, int]:
    """Inverse of :func:`pair`."""
    s = (isqrt(8 * n + 1) - 1) // 2
    j = n - s * (s + 1) // 2
    return s - j, j


@dataclass(frozen=True)
class PairingScheme:
    encode: Callable[[int, int], int]
    decode: Callable[[int], tuple[int, int]]


CANTOR = PairingScheme(encode=pair, decode=unpair)


# ---------------------------------------------------------------------------
# Semidecision processes

@dataclass(frozen=True)
class Accepted:
    stage: int


class _Pending:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Pending"


PENDING = _Pending()


class SemidecisionProcess:
    """A fuel-monotone accept/pending computation.

    ``eval(f)`` performs steps ``0 .. f-1``; once a step accepts, every
    larger budget reports an acceptance stage that is not larger.
    """

    def eval(self, fuel: int):
        stage = self.poll(fuel)
        return PENDING if stage is None else Accepted(stage)

    def accepts(self, fuel: int) -> bool:
        return self.poll(fuel) is not None

    def poll(self, fuel: int) -> int | None:
        """Acceptance stage if it is ``< fuel``, else None."""
        raise NotImplementedError


def run_process(process: SemidecisionProcess, fuel: int):
    """Evaluate ``process`` on ``fuel``; same fuel always gives the same answer."""
    if fuel < 0:
        raise ValueError("fuel must be nonnegative")
    return process.eval(fuel)


class Machine(SemidecisionProcess):
    """Incremental process: ``step(t)`` runs exactly once per stage, in order.

    Subclasses implement ``step`` returning True at the accepting stage.
    ``stall()`` declares that no future step can change anything, letting
    large-fuel polls of permanently pending machines return immediately.
    """

    def __init__(self) -> None:
        self._stage = 0
        self._hit: int | None = None
        self._stalled = False

    def poll(self, fuel: int) -> int | None:
        while self._hit is None and not self._stalled and self._stage < fuel:
            t = self._stage
            self._stage += 1
            if self.step(t):
                self._hit = t
        if self._hit is not None and self._hit < fuel:
            return self._hit
        return None

    def step(self, t: int) -> bool:
        raise NotImplementedError

    def stall(self) -> None:
        self._stalled = True


class _Check(Machine):
    def __init__(self, check: Callable[[int], bool]):
        super().__init__()
        self._check = check

    def step(self, t: int) -> bool:
        return self._check(t)


def process_from_check(check: Callable[[int], bool]) -> SemidecisionProcess:
    """Process accepting at the least stage where ``check`` holds."""
    return _Check(check)


def accept_at(stage: int) -> SemidecisionProcess:
    return _Check(lambda t: t == stage)


def never() -> SemidecisionProcess:
    return _Check(lambda t: False)


class _Both(SemidecisionProcess):
    def __init__(self, a: SemidecisionProcess, b: SemidecisionProcess):
        self.a = a
        self.b = b

    def poll(self, fuel: int) -> int | None:
        sa = self.a.poll(fuel)
        if sa is None:
            return None
        sb = self.b.poll(fuel)
        if sb is None:
            return None
        return max(sa, sb)


def both_accept(a: SemidecisionProcess, b: SemidecisionProcess) -> SemidecisionProcess:
    """Accepts iff both accept; stage is the max of the two stages."""
    return _Both(a, b)


class _Either(SemidecisionProcess):
    def __init__(self, processes: Sequence[SemidecisionProcess]):
        self.processes = tuple(processes)

    def poll(self, fuel: int) -> int | None:
        stages = [s for s in (p.poll(fuel) for p in self.processes) if s is not None]
        return min(stages) if stages else None


def any_accepts(*processes: SemidecisionProcess) -> SemidecisionProcess:
    """Accepts iff some argument accepts; stage is the least accepting stage."""
    return _Either(processes)


# ---------------------------------------------------------------------------
# Monotone enumerators

class MonotoneEnumerator(Generic[T]):
    """Stage-indexed listing; ``step(t)`` yields the items appearing at stage t.

    ``listing(s)`` is a prefix of ``listing(s + 1)`` by construction.  A
    stalled enumerator emits nothing at any later stage; finite listings
    stall once exhausted so consumers can stop polling them.
    """

    def __init__(self) -> None:
        self._items: list[T] = []
        # change points: _marks[i] = stage strictly after which _counts[i] items exist
        self._marks: list[int] = []
        self._counts: list[int] = []
        self._stage = 0
        self._stalled = False

    def step(self, t: int) -> Iterable[T]:
        raise NotImplementedError

    def stall(self) -> None:
        self._stalled = True

    @property
    def stalled(self) -> bool:
        return self._stalled

    def advance(self, stage: int) -> None:
        while self._stage < stage and not self._stalled:
            t = self._stage
            self._stage += 1
            new = tuple(self.step(t))
            if new:
                self._items.extend(new)
                self._marks.append(t)
                self._counts.append(len(self._items))

    def count(self, stage: int) -> int:
        """Number of items emitted at stages ``< stage``."""
        self.advance(stage)
        k = bisect_right(self._marks, stage - 1)
        return self._counts[k - 1] if k else 0

    def listing(self, stage: int) -> Sequence[T]:
        return self._items[: self.count(stage)]

    def between(self, lo_stage: int, hi_stage: int) -> Sequence[T]:
        """Items emitted at stages in ``[lo_stage, hi_stage)``."""
        a = self.count(lo_stage)
        b = self.count(hi_stage)
        return self._items[a:b]

    def quiescent(self, stage: int) -> bool:
        """True once the listing can no longer grow past ``stage``."""
        self.advance(stage)
        return self._stalled and self._stage <= stage


class _FromList(MonotoneEnumerator[T]):
    def __init__(self, items: Sequence[T]):
        super().__init__()
        self._source = tuple(items)

    def step(self, t: int) -> Iterable[T]:
        if t < len(self._source):
            return (self._source[t],)
        self.stall()
        return ()


def enumerate_list(items: Sequence[T]) -> MonotoneEnumerator[T]:
    """Finite listing, one item per stage, stalled afterwards."""
    return _FromList(items)


class _FromFunction(MonotoneEnumerator[T]):
    def __init__(self, fn: Callable[[int], T]):
        super().__init__()
        self._fn = fn

    def step(self, t: int) -> Iterable[T]:
        return (self._fn(t),)


def enumerate_function(fn: Callable[[int], T]) -> MonotoneEnumerator[T]:
    """Infinite listing whose stage-t item is ``fn(t)``."""
    return _FromFunction(fn)


class _FromStep(MonotoneEnumerator[T]):
    def __init__(self, step_fn: Callable[[int], Iterable[T]],
                 stall_after: int | None = None):
        super().__init__()
        self._step_fn = step_fn
        self._stall_after = stall_after

    def step(self, t: int) -> Iterable[T]:
        if self._stall_after is not None and t >= self._stall_after:
            self.stall()
            return ()
        return self._step_fn(t)


def enumerate_step(step_fn: Callable[[int], Iterable[T]],
                   stall_after: int | None = None) -> MonotoneEnumerator[T]:
    """Listing emitting ``step_fn(t)`` (possibly nothing) at stage t."""
    return _FromStep(step_fn, stall_after)


class _Interleave(MonotoneEnumerator[T]):
    def __init__(self, sources: Sequence[MonotoneEnumerator[T]]):
        super().__init__()
        self._sources = tuple(sources)
        self._cursors = [0] * len(sources)

    def step(self, t: int) -> Iterable[T]:
        if not self._sources:
            self.stall()
            return ()
        i = t % len(self._sources)
        src = self._sources[i]
        cur = self._cursors[i]
        src.advance(cur + 1)
        out = src.between(cur, cur + 1)
        self._cursors[i] = cur + 1
        if all(s.stalled and c >= s._stage for s, c in zip(self._sources, self._cursors)):
            self.stall()
        return out


def interleave(sources: Sequence[MonotoneEnumerator[T]]) -> MonotoneEnumerator[T]:
    """Fair round-robin merge; stalls when every source has been drained."""
    return _Interleave(sources)


class _Mapped(MonotoneEnumerator[U]):
    def __init__(self, source: MonotoneEnumerator[T], fn: Callable[[T], U]):
        super().__init__()
        self._source = source
        self._fn = fn
        self._cursor = 0

    def step(self, t: int) -> Iterable[U]:
        self._source.advance(self._cursor + 1)
        out = [self._fn(x) for x in self._source.between(self._cursor, self._cursor + 1)]
        self._cursor += 1
        if self._source.stalled and self._cursor >= self._source._stage:
            self.stall()
        return out


def map_enumerator(source: MonotoneEnumerator[T], fn: Callable[[T], U]) -> MonotoneEnumerator[U]:
    return _Mapped(source, fn)


# ---------------------------------------------------------------------------
# Dovetailing

class _DovetailAny(Machine):
    """Existential search over an enumerated family of processes.

    Schedule: at global step t, decode t = (i, j) and run process i for its
    j-th step; acceptance stage is the global step of the first acceptance.
    """

    def __init__(self, processes: MonotoneEnumerator[SemidecisionProcess]):
        super().__init__()
        self._processes = processes

    def step(self, t: int) -> bool:
        i, j = unpair(t)
        listing = self._processes.listing(t + 1)
        if i < len(listing):
            stage = listing[i].poll(j + 1)
            if stage is not None and stage <= j:
                return True
        # Periodically check whether progress is still possible at all.
        if t & (t + 1) == 0 and self._processes.quiescent(t + 1):
            if all(isinstance(p, Machine) and p._stalled and p._hit is None
                   for p in listing):
                self.stall()
        return False


def dovetail_any(processes: MonotoneEnumerator[SemidecisionProcess]) -> SemidecisionProcess:
    """Accepts iff some enumerated process accepts."""
    return _DovetailAny(processes)


# ---------------------------------------------------------------------------
# Round-robin search over spawned processes

class SearchEnumerator(MonotoneEnumerator[T]):
    """Emits each candidate whose spawned process accepts.

    Candidates arrive from ``candidates``; one live process is advanced by
    one fuel unit per stage, cycling deterministically.  Accepted candidates
    are emitted at the stage of detection and retired.
    """

    def __init__(self, candidates: MonotoneEnumerator[T],
                 spawn: Callable[[T], SemidecisionProcess]):
        super().__init__()
        self._candidates = candidates
        self._spawn = spawn
        self._cursor = 0
        self._live: list[tuple[T, SemidecisionProcess, int]] = []
        self._next = 0

    def step(self, t: int) -> Iterable[T]:
        self._candidates.advance(self._cursor + 1)
        for cand in self._candidates.between(self._cursor, self._cursor + 1):
            self._live.append((cand, self._spawn(cand), 0))
        self._cursor += 1
        out = []
        if self._live:
            self._next %= len(self._live)
            cand, proc, fuel = self._live[self._next]
            fuel += 1
            stage = proc.poll(fuel)
            if stage is not None:
                out.append(cand)
                self._live.pop(self._next)
            elif isinstance(proc, Machine) and proc._stalled:
                self._live.pop(self._next)
            else:
                self._live[self._next] = (cand, proc, fuel)
                self._next += 1
        elif self._candidates.stalled and self._cursor >= self._candidates._stage:
            self.stall()
        return out


def search(candidates: MonotoneEnumerator[T],
           spawn: Callable[[T], SemidecisionProcess]) -> MonotoneEnumerator[T]:
    return SearchEnumerator(candidates, spawn)
