"""Unit behavior of the forbidden-schedule representations.

Covers the symbolic expressions (pattern scan, absorb/consume, completion
gating, retirement) and the explicit stored records, including the
differential agreement between the two on identical walks.
"""

from __future__ import annotations

import pytest

from pop_smc.sleepsets import (
    AnnotatedEvent,
    EventView,
    Flat,
    Nested,
    PSeq,
    StoredFlat,
    StoredNested,
    conflicting_views,
    dep_views,
    explicit_seq,
    mk_sched_char,
    mk_stored_char,
    render_sschar,
    stored_weight,
    upd_event,
    upd_p,
    upd_se,
    upd_seq,
    view_of,
)


def ev(thread: str, idx: int, etype: str, var: str | None, label: str, target: str | None = None) -> EventView:
    return EventView((thread, idx), thread, etype, var, target, label)


def hb_from(*keys) -> object:
    known = set(keys)
    return lambda key: key in known


W_Y = ev("q", 1, "W", "y", "y=1")
HEAD = ev("p", 3, "R", "x", "r=x")


# ---- view-level predicates ---------------------------------------------------------


def test_view_predicates_mirror_event_dependence():
    a = ev("p", 1, "W", "x", "x=1")
    b = ev("q", 1, "R", "x", "r=x")
    c = ev("q", 2, "R", "y", "s=y")
    d = ev("p", 2, "R", "x", "t=x")
    assert conflicting_views(a, b) and dep_views(a, b)
    assert not conflicting_views(b, d)  # two reads
    assert not conflicting_views(a, d)  # same thread
    assert dep_views(a, d)  # program order
    assert not dep_views(b, c) or b.thread == c.thread  # same thread only
    spawn = ev("p", 3, "SPAWN", None, "spawn(q)", target="q")
    assert dep_views(spawn, b)
    join = ev("p", 4, "JOIN", None, "join(q)", target="q")
    assert dep_views(spawn, join)


# ---- pattern scan ------------------------------------------------------------------


def seg(*views: EventView) -> tuple[AnnotatedEvent, ...]:
    return tuple(AnnotatedEvent(v, frozenset()) for v in views)


def test_unrelated_event_leaves_the_pattern_alone():
    pseq = PSeq((seg(W_Y),), ())
    walker = ev("r", 1, "R", "z", "a=z")
    verdict, p2, reads = upd_p(walker, hb_from(), pseq, "x", frozenset())
    assert verdict == "indep"
    assert p2 == pseq and reads == frozenset()


def test_conflicting_event_is_absorbed_into_the_entry():
    pseq = PSeq((seg(W_Y),), ())
    walker = ev("r", 1, "W", "y", "y=2")
    verdict, p2, _ = upd_p(walker, hb_from(), pseq, "x", frozenset())
    assert verdict == "continue"
    assert p2.segs[0][0].conflicts == frozenset({walker})
    # A later event of the absorbed thread now interacts through the record.
    follow = ev("r", 2, "W", "z", "z=1")
    verdict, _, _ = upd_p(follow, hb_from(), p2, "x", frozenset())
    assert verdict == "continue"


def test_equal_event_is_consumed_from_the_segment():
    pseq = PSeq((seg(W_Y),), ())
    verdict, p2, _ = upd_p(W_Y, hb_from(), pseq, "x", frozenset())
    assert verdict == "continue"
    assert p2.segs == ((),)


def test_completing_read_blocks_only_with_no_recorded_read_before_it():
    pseq = PSeq((seg(W_Y),), ())
    absorb = ev("r", 1, "W", "y", "y=2")
    _, p2, _ = upd_p(absorb, hb_from(), pseq, "x", frozenset())
    completer = ev("r", 2, "R", "x", "c=x")

    verdict, _, reads = upd_p(completer, hb_from(), p2, "x", frozenset())
    assert verdict == "block"
    assert completer.key in reads

    # The same read passing after a recorded earlier read is let through.
    seeded = frozenset({HEAD.key})
    verdict, _, reads = upd_p(completer, hb_from(HEAD.key), p2, "x", seeded)
    assert verdict == "continue"
    assert completer.key in reads

    # A recorded read that does not reach the completer keeps the block.
    verdict, _, _ = upd_p(completer, hb_from(), p2, "x", seeded)
    assert verdict == "block"


def test_brace_heads_gate_completion():
    brace = ev("s", 1, "R", "y", "h=y")
    pseq = PSeq(((), seg(W_Y)), (brace,))
    verdict, _, _ = upd_p(W_Y, hb_from(brace.key), pseq, "y", frozenset())
    assert verdict == "continue"  # a write never completes; consumed instead
    completer = ev("r", 1, "R", "y", "c=y")
    verdict, _, _ = upd_p(completer, hb_from(brace.key), pseq, "y", frozenset())
    assert verdict == "block"
    verdict, _, _ = upd_p(completer, hb_from(), pseq, "y", frozenset())
    assert verdict == "continue"  # brace head not reached: schedule incomplete


# ---- retirement --------------------------------------------------------------------


def test_write_on_guarded_variable_retires_expressions():
    flat = Flat(PSeq((seg(W_Y),), ()), "x", frozenset())
    writer = ev("r", 1, "W", "x", "x=9")
    blocked, nxt = upd_event(writer, hb_from(), frozenset({flat}))
    assert not blocked and nxt == frozenset()


def test_write_retires_nested_inner_in_place():
    inner = Flat(PSeq(((),), ()), "x", frozenset())
    outer = Nested(PSeq((seg(W_Y),), ()), inner, frozenset(), "y", frozenset())
    writer = ev("r", 1, "W", "x", "x=9")
    blocked, nxt = upd_event(writer, hb_from(), frozenset({outer}))
    assert not blocked
    (kept,) = nxt
    assert isinstance(kept, Nested) and kept.inner is None
    assert kept.render().endswith("<-> |> y")


# ---- construction ------------------------------------------------------------------


def interior_char() -> frozenset:
    return frozenset({Flat(PSeq(((),),  ()), "y", frozenset({("s", 1)}))})


def test_construction_splits_segments_and_seeds_recorded_reads():
    brace = ev("s", 1, "R", "y", "h=y")
    tail = ev("t", 1, "W", "z", "z=1")
    items = [("w", W_Y), ("head", brace, interior_char()), ("w", tail)]
    char = mk_sched_char(items, "x", HEAD)
    flats = [e for e in char if isinstance(e, Flat)]
    nesteds = [e for e in char if isinstance(e, Nested)]
    assert len(flats) == 1 and len(nesteds) == 1
    flat = flats[0]
    assert flat.var == "x"
    assert flat.p.heads == (brace,)
    assert [tuple(a.event for a in s) for s in flat.p.segs] == [(W_Y,), (tail,)]
    assert flat.reads == frozenset({HEAD.key})
    nested = nesteds[0]
    assert nested.p.heads == ()  # inherits under the prefix before the brace
    assert nested.reads == frozenset({HEAD.key})


def test_write_headed_braces_inherit_nothing():
    brace = ev("s", 1, "W", "y", "y=7")
    char = mk_sched_char([("head", brace, None)], "x", HEAD)
    assert all(isinstance(e, Flat) for e in char)


def test_read_headed_brace_requires_a_stored_characterization():
    brace = ev("s", 1, "R", "y", "h=y")
    with pytest.raises(RuntimeError):
        mk_sched_char([("head", brace, None)], "x", HEAD)


def test_chained_reversal_inherits_under_the_full_pattern():
    items = [("w", W_Y), ("chain", interior_char())]
    char = mk_sched_char(items, "x", HEAD)
    nesteds = [e for e in char if isinstance(e, Nested)]
    assert len(nesteds) == 1
    assert [tuple(a.event for a in s) for s in nesteds[0].p.segs] == [(W_Y,)]
    assert nesteds[0].reads == frozenset({HEAD.key})


def test_seeded_read_lets_dependent_completions_through():
    char = mk_sched_char([("w", W_Y)], "x", HEAD)
    absorb = ev("r", 1, "W", "y", "y=2")
    completer = ev("r", 2, "R", "x", "c=x")
    blocked, _ = upd_seq([(absorb, hb_from()), (completer, hb_from(absorb.key))], char)
    assert blocked
    # A completer that happens after the inserted schedule's head cannot head
    # a fresh schedule and must pass.
    blocked, _ = upd_seq(
        [(absorb, hb_from()), (completer, hb_from(absorb.key, HEAD.key))], char
    )
    assert not blocked


# ---- rendering ---------------------------------------------------------------------


def test_renderings_show_segments_braces_and_guards():
    brace = ev("s", 1, "R", "y", "h=y")
    pseq = PSeq((seg(W_Y), seg(ev("t", 1, "W", "z", "z=1"))), (brace,))
    flat = Flat(pseq, "x", frozenset())
    assert flat.render() == "<y=1>{h=y}<z=1> |> x"
    inner = Flat(PSeq(((),), ()), "y", frozenset())
    nested = Nested(PSeq((seg(W_Y),), ()), inner, frozenset(), "x", frozenset())
    assert nested.render() == "<y=1><<> |> y> |> x"
    annotated = PSeq(((AnnotatedEvent(W_Y, frozenset({HEAD})),),), ())
    assert Flat(annotated, "x", frozenset()).render(verbose=True) == "<y=1^{r=x}> |> x"
    assert render_sschar(frozenset({flat})) == "<y=1>{h=y}<z=1> |> x"


# ---- explicit records --------------------------------------------------------------


def test_stored_records_mirror_the_symbolic_construction():
    w_x = ev("q", 1, "W", "x", "x=1")
    sigma = [w_x, HEAD]
    leftover = ev("t", 1, "W", "z", "z=1")
    store = mk_stored_char([("w", leftover)], "x", sigma)
    (rec,) = store
    assert isinstance(rec, StoredFlat)
    assert [c.view for c in rec.cells] == [leftover]
    assert rec.reads == frozenset({HEAD.key})
    # Denoted listing: the only other read-x-schedule over these events is the
    # head alone (the leftover write does not reach it).
    assert rec.denoted == ((HEAD,),)
    assert stored_weight(rec) == 1


def test_stored_weight_counts_listings_and_inherited_copies():
    flat = StoredFlat((), "x", (), frozenset(), frozenset(), ((HEAD,), (W_Y, HEAD)))
    assert stored_weight(flat) == 2
    nested = StoredNested((), flat, frozenset(), "x", (), frozenset(), frozenset())
    assert stored_weight(nested) == 3


def test_symbolic_and_explicit_agree_on_identical_walks():
    w_x = ev("q", 1, "W", "x", "x=1")
    sigma = [w_x, HEAD]
    items = [("w", W_Y)]
    sym = mk_sched_char(items, "x", HEAD)
    sto = mk_stored_char(items, "x", sigma)
    absorb = ev("r", 1, "W", "y", "y=2")
    completer = ev("r", 2, "R", "x", "c=x")
    other = ev("u", 1, "R", "z", "o=z")
    walks = [
        [(absorb, hb_from()), (completer, hb_from(absorb.key))],
        [(absorb, hb_from()), (completer, hb_from(absorb.key, HEAD.key))],
        [(other, hb_from()), (W_Y, hb_from()), (completer, hb_from(W_Y.key))],
        [(ev("r", 1, "W", "x", "x=5"), hb_from()), (completer, hb_from())],
    ]
    for walk in walks:
        b_sym, _ = upd_seq(walk, sym)
        b_sto, _ = explicit_seq(walk, sto)
        assert b_sym == b_sto
