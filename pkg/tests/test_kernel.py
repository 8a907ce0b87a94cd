from __future__ import annotations

import itertools

from erctopo.kernel import (
    Accepted,
    CANTOR,
    PENDING,
    accept_at,
    any_accepts,
    both_accept,
    dovetail_any,
    enumerate_function,
    enumerate_list,
    enumerate_step,
    interleave,
    never,
    pair,
    process_from_check,
    run_process,
    search,
    unpair,
)


def test_pairing_roundtrip_pairs():
    for i in range(60):
        for j in range(60):
            assert unpair(pair(i, j)) == (i, j)


def test_pairing_roundtrip_naturals():
    for n in range(5000):
        i, j = unpair(n)
        assert pair(i, j) == n


def test_pairing_scheme_object():
    assert CANTOR.decode(CANTOR.encode(7, 11)) == (7, 11)


def test_run_process_always_pending():
    assert run_process(never(), 1000) is PENDING


def test_run_process_insufficient_fuel():
    assert run_process(accept_at(3), 2) is PENDING


def test_run_process_accepts_at_stage():
    assert run_process(accept_at(3), 10) == Accepted(3)


def test_run_process_repeatable():
    p = accept_at(5)
    first = run_process(p, 100)
    assert run_process(p, 100) == first == Accepted(5)
    assert run_process(p, 3) is PENDING
    assert run_process(p, 100) == Accepted(5)


def test_process_monotone_in_fuel():
    p = process_from_check(lambda t: t >= 17)
    last_stage = None
    for fuel in range(0, 200):
        res = run_process(p, fuel)
        if last_stage is not None:
            assert isinstance(res, Accepted)
            assert res.stage <= last_stage
        if isinstance(res, Accepted):
            last_stage = res.stage
    assert last_stage == 17


def test_both_accept():
    assert run_process(both_accept(accept_at(1), accept_at(4)), 100) == Accepted(4)
    assert run_process(both_accept(accept_at(1), never()), 100) is PENDING
    assert run_process(both_accept(never(), never()), 100) is PENDING


def test_any_accepts():
    assert run_process(any_accepts(accept_at(9), accept_at(2)), 100) == Accepted(2)
    assert run_process(any_accepts(never(), never()), 100) is PENDING


# -- dovetailing ------------------------------------------------------------

def schedule_oracle(process_stages, appear_at, max_step):
    """Exhaustive run of the fixed schedule, independent of dovetail_any.

    process_stages[i] is the acceptance stage of process i (None = never);
    appear_at[i] is the enumeration stage at which process i is listed.
    Returns the first global step t = pair(i, j) whose decoded process is
    already listed and accepts with stage <= j.
    """
    for t in range(max_step):
        i, j = unpair(t)
        listed = [k for k in range(len(appear_at)) if appear_at[k] <= t]
        if i < len(listed):
            s = process_stages[listed[i]]
            if s is not None and s <= j:
                return t
    return None


def test_dovetail_finds_immediate_acceptor():
    ps = enumerate_list([accept_at(0)])
    res = run_process(dovetail_any(ps), 100)
    assert isinstance(res, Accepted)
    assert res.stage == schedule_oracle([0], [0], 100) == 0


def test_dovetail_all_pending():
    ps = enumerate_list([never(), never(), never()])
    assert run_process(dovetail_any(ps), 10 ** 4) is PENDING


def test_dovetail_late_acceptor_matches_schedule_oracle():
    # acceptor first appears at enumeration stage 5
    def step(t):
        if t == 5:
            return (accept_at(0),)
        if t < 5:
            return (never(),)
        return ()

    ps = enumerate_step(step)
    res = run_process(dovetail_any(ps), 10 ** 4)
    assert isinstance(res, Accepted)
    expected = schedule_oracle([None] * 5 + [0], [0, 1, 2, 3, 4, 5], 10 ** 4)
    assert res.stage == expected
    assert res.stage >= 5


def test_dovetail_order_insensitive_acceptance():
    # permuting a finite enumeration changes the stage but not acceptance
    base = [accept_at(2), never(), accept_at(7)]
    for perm in itertools.permutations(range(3)):
        ps = enumerate_list([base[k] for k in perm])
        assert isinstance(run_process(dovetail_any(ps), 10 ** 4), Accepted)
    for perm in itertools.permutations(range(3)):
        ps = enumerate_list([never(), never(), never()][k] for k in perm)
        assert run_process(dovetail_any(enumerate_list([never()] * 3)), 2000) is PENDING


# -- enumerators ------------------------------------------------------------

def test_listing_prefix_monotone():
    e = enumerate_function(lambda t: t * t)
    prev = ()
    for s in range(0, 300):
        cur = tuple(e.listing(s))
        assert cur[: len(prev)] == prev
        prev = cur
    assert prev[:5] == (0, 1, 4, 9, 16)


def test_enumerate_list_stalls():
    e = enumerate_list([10, 11])
    assert tuple(e.listing(50)) == (10, 11)
    assert e.quiescent(50)


def test_enumerate_step_sparse_emission():
    e = enumerate_step(lambda t: (t,) if t % 3 == 0 else ())
    assert tuple(e.listing(10)) == (0, 3, 6, 9)
    assert tuple(e.between(3, 7)) == (3, 6)


def test_interleave_is_fair_and_complete():
    a = enumerate_list(["a0", "a1"])
    b = enumerate_list(["b0"])
    merged = interleave([a, b])
    assert set(merged.listing(50)) == {"a0", "a1", "b0"}
    assert merged.quiescent(50)


def test_interleave_of_infinite_sources():
    a = enumerate_function(lambda t: ("a", t))
    b = enumerate_function(lambda t: ("b", t))
    merged = interleave([a, b])
    items = list(merged.listing(40))
    assert ("a", 0) in items and ("b", 0) in items
    assert items.index(("a", 0)) < items.index(("a", 1))


def test_search_emits_accepted_candidates():
    cands = enumerate_list([0, 1, 2, 3])
    found = search(cands, lambda c: accept_at(c) if c % 2 == 0 else never())
    listing = found.listing(4000)
    assert set(listing) == {0, 2}


def test_search_on_empty_candidates_stalls():
    found = search(enumerate_list([]), lambda c: accept_at(0))
    assert tuple(found.listing(100)) == ()
    assert found.quiescent(100)
