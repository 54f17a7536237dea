"""Sleep sets over read schedules: symbolic characterizations and an explicit oracle.

After a race reversal the explorer enters a subtree in which certain read
schedules (those already covered from the same branching point) must not be
completed again.  This module provides two interchangeable representations of
that set:

* A *symbolic* form.  Each :class:`Flat` expression ``P |> x`` consists of a
  pattern ``P`` (the leftover events of the old branch, split into segments by
  brace-marked schedule heads, each entry annotated with the conflicts seen so
  far) guarding reads on variable ``x``; :class:`Nested` expressions
  additionally embed the characterization of an inner schedule whose own
  alternatives are inherited.  ``upd_se`` pushes one executed event through an
  expression and reports ``block`` when the event would complete a forbidden
  read schedule, ``indep`` when the event does not interact with the pattern,
  and ``continue`` otherwise.  ``upd_seq`` lifts this to event sequences over a
  whole expression set, retiring guards on ``x`` once a write on ``x`` executes
  (conflicting accesses are totally ordered within one execution, so no later
  read of ``x`` can head a read-``x``-schedule): a top-level guard discards the
  expression, an inner guard of a nested expression is marked dead while the
  enclosing expression and its recorded inner heads stay live.

* An *explicit* form (:class:`StoredFlat`/:class:`StoredNested` built by
  ``mk_stored_char``) that keeps the forbidden schedules verbatim: each record
  lists the denoted read schedules as concrete event sequences and decides,
  event by event (``explicit_event``), whether the executed continuation is
  completing one of them.  The scanning code is written independently of the
  symbolic form, so running both and comparing verdicts is a meaningful
  differential check; the verbatim listings are also what the explorer counts
  when it reports how many schedules the explicit representation retains.

Events are handled as :class:`EventView` values: immutable, hashable snapshots
of the event attributes that matter here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

from .trace import Event


class EventView(NamedTuple):
    key: tuple[str, int]
    thread: str
    etype: str
    var: str | None
    target: str | None
    label: str


def view_of(ev: Event) -> EventView:
    return EventView((ev.thread, ev.index), ev.thread, ev.etype, ev.var, ev.target, ev.label)


def dep_views(a: EventView, b: EventView) -> bool:
    """Dependence on view snapshots; mirrors :func:`pop_smc.trace.dependent`."""

    if a.thread == b.thread:
        return True
    if a.var is not None and a.var == b.var and (a.etype == "W" or b.etype == "W"):
        return True
    for x, y in ((a, b), (b, a)):
        if x.etype in ("SPAWN", "JOIN"):
            if y.thread == x.target:
                return True
            if x.etype == "SPAWN" and y.etype == "JOIN" and y.target == x.target:
                return True
    return False


def conflicting_views(a: EventView, b: EventView) -> bool:
    """Same-variable conflict between different threads (at least one write)."""

    return (
        a.thread != b.thread
        and a.var is not None
        and a.var == b.var
        and (a.etype == "W" or b.etype == "W")
    )


HbPredicate = Callable[[tuple[str, int]], bool]


# ---- symbolic expressions ------------------------------------------------------


class AnnotatedEvent(NamedTuple):
    event: EventView
    conflicts: frozenset[EventView]


@dataclass(frozen=True)
class PSeq:
    """Leftover-event segments separated by brace-marked schedule heads.

    ``segs`` has exactly ``len(heads) + 1`` entries; ``heads[i]`` sits between
    ``segs[i]`` and ``segs[i+1]``.
    """

    segs: tuple[tuple[AnnotatedEvent, ...], ...]
    heads: tuple[EventView, ...]

    def render(self, verbose: bool = False) -> str:
        parts: list[str] = []
        for i, seg in enumerate(self.segs):
            if i:
                parts.append("{" + self.heads[i - 1].label + "}")
            if seg:
                body = []
                for ann in seg:
                    if verbose and ann.conflicts:
                        cs = ",".join(sorted(c.label for c in ann.conflicts))
                        body.append(f"{ann.event.label}^{{{cs}}}")
                    else:
                        body.append(ann.event.label)
                parts.append("<" + " ".join(body) + ">")
        return "".join(parts)


@dataclass(frozen=True)
class Flat:
    p: PSeq
    var: str
    reads: frozenset[tuple[str, int]]

    def render(self, verbose: bool = False) -> str:
        body = self.p.render(verbose) or "<>"
        return f"{body} |> {self.var}"


@dataclass(frozen=True)
class Nested:
    p: PSeq
    inner: "SleepSetExpr | None"  # None once a write on the inner variable retired it
    heads_seen: frozenset[tuple[tuple[str, int], str]]
    var: str
    reads: frozenset[tuple[str, int]]

    def render(self, verbose: bool = False) -> str:
        body = "-" if self.inner is None else self.inner.render(verbose)
        return f"{self.p.render(verbose)}<{body}> |> {self.var}"


SleepSetExpr = Union[Flat, Nested]
SSChar = frozenset


@dataclass(frozen=True)
class UpdResult:
    verdict: str  # "block" | "indep" | "continue"
    expr: SleepSetExpr


def render_sschar(sschar: SSChar, verbose: bool = False) -> str:
    return "\n".join(sorted(e.render(verbose) for e in sschar))


# ---- incremental updates -------------------------------------------------------


def upd_p(
    ev: EventView,
    hb: HbPredicate,
    pseq: PSeq,
    x: str,
    reads: frozenset,
) -> tuple[str, PSeq, frozenset]:
    """Push one event through a pattern.

    Scans the segments in order and stops at the first entry the event
    interacts with: an entry it conflicts with (directly or through that
    entry's recorded conflicts) absorbs it into the conflict set, an entry
    equal to it is consumed.  A read on ``x`` that hit and happens-after the
    brace heads left of the hit is completing a forbidden read-``x``-schedule
    (a contained one when consumed, a conflicting one when absorbed) --
    unless a read already recorded in ``reads`` happens-before it, in which
    case its own history contains that earlier read of ``x`` and it cannot
    head a read-``x``-schedule.  Every read that passes the head test is
    recorded in ``reads``.
    """

    segs = pseq.segs
    hit: tuple[int, int, bool] | None = None
    for si, seg in enumerate(segs):
        for ei, ann in enumerate(seg):
            if conflicting_views(ev, ann.event) or any(dep_views(ev, c) for c in ann.conflicts):
                hit = (si, ei, True)
                break
            if ev.key == ann.event.key:
                hit = (si, ei, False)
                break
        if hit is not None:
            break
    if hit is None:
        return ("indep", pseq, reads)
    si, ei, absorbed = hit
    seg = segs[si]
    if absorbed:
        ann = seg[ei]
        new_seg = seg[:ei] + (AnnotatedEvent(ann.event, ann.conflicts | {ev}),) + seg[ei + 1 :]
    else:
        new_seg = seg[:ei] + seg[ei + 1 :]
    new_pseq = PSeq(segs[:si] + (new_seg,) + segs[si + 1 :], pseq.heads)
    if ev.etype == "R" and ev.var == x and all(hb(h.key) for h in pseq.heads[:si]):
        new_reads = reads | {ev.key}
        if not any(hb(rk) for rk in reads):
            return ("block", new_pseq, new_reads)
        return ("continue", new_pseq, new_reads)
    return ("continue", new_pseq, reads)


def upd_se(ev: EventView, hb: HbPredicate, expr: SleepSetExpr) -> UpdResult:
    """Push one event through a single expression."""

    if isinstance(expr, Flat):
        verdict, p2, r2 = upd_p(ev, hb, expr.p, expr.var, expr.reads)
        return UpdResult(verdict, Flat(p2, expr.var, r2))

    x = expr.var
    verdict, p2, r2 = upd_p(ev, hb, expr.p, x, expr.reads)
    if verdict != "indep":
        return UpdResult(verdict, Nested(p2, expr.inner, expr.heads_seen, x, r2))

    # The event does not interact with the outer pattern.
    def completes() -> bool:
        return all(hb(h.key) for h in expr.p.heads) and not any(hb(rk) for rk in expr.reads)

    if ev.etype == "R" and ev.var == x and any(v != x and hb(k) for k, v in expr.heads_seen):
        # A recorded inner-block event on another variable reaches this read:
        # the read heads an inherited read-x-schedule.
        verdict = "block" if completes() else "continue"
        return UpdResult(verdict, Nested(expr.p, expr.inner, expr.heads_seen, x, expr.reads | {ev.key}))
    if expr.inner is None:
        return UpdResult("indep", expr)
    inner_res = upd_se(ev, hb, expr.inner)
    if inner_res.verdict == "block":
        d2 = expr.heads_seen | {(ev.key, ev.var)}
        if x == expr.inner.var:
            verdict = "block" if completes() else "continue"
            return UpdResult(verdict, Nested(expr.p, inner_res.expr, d2, x, expr.reads | {ev.key}))
        return UpdResult("continue", Nested(expr.p, inner_res.expr, d2, x, expr.reads))
    return UpdResult(inner_res.verdict, Nested(expr.p, inner_res.expr, expr.heads_seen, x, expr.reads))


def _purge(expr: SleepSetExpr, v: str) -> SleepSetExpr | None:
    """Retire the parts of an expression guarding ``v`` after a write on ``v``.

    Any later read of ``v`` happens-after that write (they conflict), so its
    closure contains a second ``v``-access and it cannot head a
    read-``v``-schedule: expressions guarding ``v`` can never block again.
    Inner expressions are retired in place; heads already recorded from them
    stay usable (those completions happened before the write).
    """

    if expr.var == v:
        return None
    if isinstance(expr, Nested) and expr.inner is not None:
        inner2 = _purge(expr.inner, v)
        if inner2 is not expr.inner:
            return Nested(expr.p, inner2, expr.heads_seen, expr.var, expr.reads)
    return expr


def upd_event(ev: EventView, hb: HbPredicate, sschar: SSChar) -> tuple[bool, SSChar]:
    """Push one event through an expression set.

    Returns ``(True, empty)`` if the event completes a forbidden schedule in
    some expression.  Otherwise returns the updated set; a write on ``v``
    retires every (sub-)expression guarding ``v``.
    """

    nxt = []
    for expr in sschar:
        res = upd_se(ev, hb, expr)
        if res.verdict == "block":
            return True, frozenset()
        nxt.append(res.expr)
    if ev.etype == "W":
        nxt = [e for e in (_purge(e, ev.var) for e in nxt) if e is not None]
    return False, frozenset(nxt)


def upd_seq(
    seq: list[tuple[EventView, HbPredicate]],
    sschar: SSChar,
) -> tuple[bool, SSChar]:
    """Push an event sequence through an expression set; block is final."""

    cur = sschar
    for ev, hb in seq:
        blocked, cur = upd_event(ev, hb, cur)
        if blocked:
            return True, frozenset()
    return False, cur


def mk_sched_char(items: list[tuple], x: str, head: EventView) -> SSChar:
    """Build the characterization of the read schedules that take priority
    over a newly inserted read-``x``-schedule headed by ``head``.

    ``items`` walks the segment between the racing write and the racing read,
    already filtered down to events *outside* the new schedule, in order:
    ``("w", view)`` for a leftover event and ``("head", view, char)`` for the
    head of a schedule previously inserted inside the segment, where ``char``
    is the expression set stored when that schedule was created (``None`` for
    write-headed schedules, which inherit nothing).  A trailing
    ``("chain", char)`` appears when the racing read is itself the head of a
    previously inserted schedule: the new schedule re-reverses that head
    against an earlier write, so the priority order of the old schedule's
    siblings carries over and its stored characterization is inherited under
    the full pattern.

    Every expression starts with ``head`` already recorded in ``reads``: a
    read that happens-after ``head`` carries a second read of ``x`` in its
    history and therefore cannot head a read-``x``-schedule from this node,
    and ``head`` is the one read of ``x`` the scan would never see otherwise
    (it executes before the expression set it created is ever consulted).
    """

    segs: list[list[AnnotatedEvent]] = [[]]
    heads: list[EventView] = []
    head_chars: list[SSChar | None] = []
    chain_chars: list[SSChar] = []
    for it in items:
        if it[0] == "w":
            segs[-1].append(AnnotatedEvent(it[1], frozenset()))
        elif it[0] == "head":
            heads.append(it[1])
            head_chars.append(it[2])
            segs.append([])
        else:
            chain_chars.append(it[1])
    seed = frozenset({head.key})
    exprs: set[SleepSetExpr] = set()
    full = PSeq(tuple(tuple(s) for s in segs), tuple(heads))
    exprs.add(Flat(full, x, seed))
    for i in range(1, len(heads) + 1):
        hv = heads[i - 1]
        if hv.etype != "R":
            continue
        char = head_chars[i - 1]
        if char is None:
            raise RuntimeError("read-headed schedule is missing its stored characterization")
        p = PSeq(tuple(tuple(s) for s in segs[:i]), tuple(heads[: i - 1]))
        for phi in char:
            exprs.add(Nested(p, phi, frozenset(), x, seed))
    for char in chain_chars:
        for phi in char:
            exprs.add(Nested(full, phi, frozenset(), x, seed))
    return frozenset(exprs)


# ---- explicit oracle -------------------------------------------------------------
#
# The oracle stores, for each inserted read schedule, the family of read
# schedules its subtree must not complete -- the *same* family the symbolic
# expressions characterize -- but keeps them as verbatim event sequences.
# ``_denote`` enumerates the family's members over the events known when the
# record is created (that listing is what the explorer counts as retained
# schedules); ``explicit_event`` decides membership for an arbitrary executed
# continuation by scanning the stored pattern, which also recognizes members
# whose remaining events were not yet known at creation time.  The scanning
# code shares no state or helpers with the symbolic form beyond the event
# snapshots, so agreement between the two is a meaningful differential check.


class PatternCell(NamedTuple):
    view: EventView
    brace: bool


@dataclass(frozen=True)
class StoredFlat:
    """Forbidden schedules contained in or conflicting with a stored pattern."""

    cells: tuple[PatternCell, ...]
    var: str
    absorbed: tuple[frozenset[EventView], ...]
    gone: frozenset[tuple[str, int]]
    reads: frozenset[tuple[str, int]]
    denoted: tuple[tuple[EventView, ...], ...]

    def render(self, verbose: bool = False) -> str:
        return f"{_render_cells(self.cells, self.gone)} |> {self.var}"


@dataclass(frozen=True)
class StoredNested:
    """Forbidden schedules inherited from an inner stored record."""

    cells: tuple[PatternCell, ...]
    inner: "StoredExpr | None"  # None once a write on the inner variable retired it
    marks: frozenset[tuple[tuple[str, int], str | None]]
    var: str
    absorbed: tuple[frozenset[EventView], ...]
    gone: frozenset[tuple[str, int]]
    reads: frozenset[tuple[str, int]]

    def render(self, verbose: bool = False) -> str:
        prefix = _render_cells(self.cells, self.gone)
        body = "-" if self.inner is None else self.inner.render(verbose)
        return f"{prefix}[{body}] |> {self.var}"


StoredExpr = Union[StoredFlat, StoredNested]


def _render_cells(cells: tuple[PatternCell, ...], gone: frozenset) -> str:
    parts: list[str] = []
    pending: list[str] = []
    for cell in cells:
        if cell.brace:
            if pending:
                parts.append("<" + " ".join(pending) + ">")
                pending = []
            parts.append("{" + cell.view.label + "}")
        elif cell.view.key not in gone:
            pending.append(cell.view.label)
    if pending:
        parts.append("<" + " ".join(pending) + ">")
    return "".join(parts)


def stored_weight(rec: StoredExpr) -> int:
    """Number of schedules a stored record keeps (the pattern counts once when
    the enumeration is empty; inherited records count their inner copy)."""

    if isinstance(rec, StoredFlat):
        return max(1, len(rec.denoted))
    return 1 + (stored_weight(rec.inner) if rec.inner is not None else 0)


def _eligible(v: EventView, chosen: frozenset, events: list[EventView]) -> bool:
    """Can ``v`` run next, given which universe events already ran?"""

    for u in events:
        if u.key in chosen:
            continue
        if u.key == v.key:
            continue
        if u.thread == v.thread and u.key[1] < v.key[1]:
            return False
        if v.etype == "JOIN" and u.thread == v.target:
            return False
    for u in events:
        if u.etype == "SPAWN" and u.target == v.thread and u.key not in chosen:
            return False
        if v.etype == "SPAWN" and v.target == u.thread and u.key in chosen:
            return False
    return True


def _dominated_by_last(prefix: tuple[EventView, ...], head: EventView) -> bool:
    """Does every prefix event reach ``head`` through dependence edges?"""

    reaching = [head]
    for u in reversed(prefix):
        if any(dep_views(u, r) for r in reaching):
            reaching.append(u)
    return len(reaching) == len(prefix) + 1


def _canon(seq: tuple[EventView, ...]) -> frozenset:
    out = []
    for i, v in enumerate(seq):
        deps = frozenset(u.key for u in seq[:i] if dep_views(u, v))
        out.append((v.key, deps))
    return frozenset(out)


_DENOTE_CLASS_CAP = 20_000
_DENOTE_STEP_CAP = 500_000


def _denote(
    universe: list[EventView],
    x: str,
    skip: tuple[EventView, ...],
) -> tuple[tuple[EventView, ...], ...]:
    """Enumerate the read-``x``-schedules expressible over ``universe``.

    Every sequence listed is a plausible execution fragment (program order,
    spawn/join causality respected) whose last event reads ``x``, touches
    ``x`` nowhere else, and happens-after every other member -- one
    representative per equivalence class, minus the class of ``skip`` (the
    schedule whose insertion created the record).  Enumeration is capped;
    at the intended desk scale the caps are never reached.
    """

    events: list[EventView] = []
    seen_keys: set = set()
    for v in universe:
        if v.key not in seen_keys:
            seen_keys.add(v.key)
            events.append(v)
    skip_canon = _canon(skip)
    accepted: dict[frozenset, tuple[EventView, ...]] = {}
    visited: set[frozenset] = set()
    budget = [_DENOTE_STEP_CAP]

    def extend(prefix: tuple[EventView, ...], chosen: frozenset, canon: set) -> None:
        if budget[0] <= 0 or len(accepted) >= _DENOTE_CLASS_CAP:
            return
        budget[0] -= 1
        for v in events:
            if v.key in chosen or not _eligible(v, chosen, events):
                continue
            deps = frozenset(u.key for u in prefix if dep_views(u, v))
            c2 = frozenset(canon | {(v.key, deps)})
            if v.etype == "R" and v.var == x:
                if c2 != skip_canon and c2 not in accepted and _dominated_by_last(prefix, v):
                    accepted[c2] = prefix + (v,)
                continue
            if v.var == x:
                continue
            if c2 in visited:
                continue
            visited.add(c2)
            extend(prefix + (v,), chosen | {v.key}, set(c2))

    extend((), frozenset(), set())
    return tuple(accepted.values())


def mk_stored_char(
    items: list[tuple],
    x: str,
    sigma_views: list[EventView],
) -> frozenset:
    """Explicit counterpart of :func:`mk_sched_char` over the same items.

    Builds one pattern record plus one inherited record per read-headed brace,
    and enumerates the denoted schedules over the events in hand (the inserted
    schedule, the leftover entries, and the brace heads).  As in the symbolic
    form, every record starts with the inserted schedule's head in ``reads``:
    reads happening-after it cannot head a read-``x``-schedule from this node.
    """

    cells: list[PatternCell] = []
    chain_chars: list[frozenset] = []
    cell_items: list[tuple] = []
    for it in items:
        if it[0] == "chain":
            chain_chars.append(it[1])
        else:
            cells.append(PatternCell(it[1], it[0] == "head"))
            cell_items.append(it)
    universe = list(sigma_views) + [c.view for c in cells]
    denoted = _denote(universe, x, tuple(sigma_views))
    seed = frozenset({sigma_views[-1].key})
    records: set[StoredExpr] = set()
    all_cells = tuple(cells)
    records.add(
        StoredFlat(
            all_cells,
            x,
            tuple(frozenset() for _ in all_cells),
            frozenset(),
            seed,
            denoted,
        )
    )
    for i, it in enumerate(cell_items):
        if it[0] != "head" or it[1].etype != "R":
            continue
        char = it[2]
        if char is None:
            raise RuntimeError("read-headed schedule is missing its stored record set")
        prefix = tuple(cells[:i])
        pads = tuple(frozenset() for _ in prefix)
        for phi in char:
            records.add(StoredNested(prefix, phi, frozenset(), x, pads, frozenset(), seed))
    pads_all = tuple(frozenset() for _ in all_cells)
    for char in chain_chars:
        for phi in char:
            records.add(StoredNested(all_cells, phi, frozenset(), x, pads_all, frozenset(), seed))
    return frozenset(records)


def _scan_cells(
    ev: EventView,
    hb: HbPredicate,
    rec_cells: tuple[PatternCell, ...],
    absorbed: tuple[frozenset, ...],
    gone: frozenset,
    x: str,
    reads: frozenset,
) -> tuple[str, tuple[frozenset, ...], frozenset, frozenset]:
    hit: tuple[int, bool] | None = None
    for i, cell in enumerate(rec_cells):
        if cell.brace or cell.view.key in gone:
            continue
        if conflicting_views(ev, cell.view) or any(dep_views(ev, c) for c in absorbed[i]):
            hit = (i, True)
            break
        if ev.key == cell.view.key:
            hit = (i, False)
            break
    if hit is None:
        return ("indep", absorbed, gone, reads)
    i, absorb = hit
    if absorb:
        absorbed = absorbed[:i] + (absorbed[i] | {ev},) + absorbed[i + 1 :]
    else:
        gone = gone | {ev.key}
    heads_left = [c.view for c in rec_cells[:i] if c.brace]
    if ev.etype == "R" and ev.var == x and all(hb(h.key) for h in heads_left):
        new_reads = reads | {ev.key}
        if not any(hb(rk) for rk in reads):
            return ("block", absorbed, gone, new_reads)
        return ("continue", absorbed, gone, new_reads)
    return ("continue", absorbed, gone, reads)


def explicit_step(ev: EventView, hb: HbPredicate, rec: StoredExpr) -> tuple[str, StoredExpr]:
    """Push one event through a stored record; mirrors the symbolic update."""

    verdict, ab2, gn2, rd2 = _scan_cells(ev, hb, rec.cells, rec.absorbed, rec.gone, rec.var, rec.reads)
    if isinstance(rec, StoredFlat):
        return verdict, StoredFlat(rec.cells, rec.var, ab2, gn2, rd2, rec.denoted)
    if verdict != "indep":
        return verdict, StoredNested(rec.cells, rec.inner, rec.marks, rec.var, ab2, gn2, rd2)

    def heads_ok() -> bool:
        heads = [c.view for c in rec.cells if c.brace]
        return all(hb(h.key) for h in heads) and not any(hb(rk) for rk in rec.reads)

    if ev.etype == "R" and ev.var == rec.var and any(v != rec.var and hb(k) for k, v in rec.marks):
        verdict = "block" if heads_ok() else "continue"
        return verdict, StoredNested(
            rec.cells, rec.inner, rec.marks, rec.var, rec.absorbed, rec.gone, rec.reads | {ev.key}
        )
    if rec.inner is None:
        return "indep", rec
    iv, inner2 = explicit_step(ev, hb, rec.inner)
    if iv == "block":
        marks2 = rec.marks | {(ev.key, ev.var)}
        if rec.var == rec.inner.var:
            verdict = "block" if heads_ok() else "continue"
            return verdict, StoredNested(
                rec.cells, inner2, marks2, rec.var, rec.absorbed, rec.gone, rec.reads | {ev.key}
            )
        return "continue", StoredNested(rec.cells, inner2, marks2, rec.var, rec.absorbed, rec.gone, rec.reads)
    return iv, StoredNested(rec.cells, inner2, rec.marks, rec.var, rec.absorbed, rec.gone, rec.reads)


def _purge_stored(rec: StoredExpr, v: str) -> StoredExpr | None:
    if rec.var == v:
        return None
    if isinstance(rec, StoredNested) and rec.inner is not None:
        inner2 = _purge_stored(rec.inner, v)
        if inner2 is not rec.inner:
            return StoredNested(rec.cells, inner2, rec.marks, rec.var, rec.absorbed, rec.gone, rec.reads)
    return rec


def explicit_event(ev: EventView, hb: HbPredicate, store: frozenset) -> tuple[bool, frozenset]:
    """Push one event through a stored-record set; mirrors :func:`upd_event`."""

    out = []
    for rec in store:
        verdict, r2 = explicit_step(ev, hb, rec)
        if verdict == "block":
            return True, frozenset()
        out.append(r2)
    if ev.etype == "W":
        out = [r for r in (_purge_stored(r, ev.var) for r in out) if r is not None]
    return False, frozenset(out)


def explicit_seq(
    seq: list[tuple[EventView, HbPredicate]],
    store: frozenset,
) -> tuple[bool, frozenset]:
    """Push an event sequence through a stored-record set; block is final."""

    cur = store
    for ev, hb in seq:
        blocked, cur = explicit_event(ev, hb, cur)
        if blocked:
            return True, frozenset()
    return False, cur
