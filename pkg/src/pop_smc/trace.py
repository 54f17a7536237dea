"""Events, executions with vector clocks, and equivalence-class utilities.

An execution is a sequence of events under sequential consistency.  Two events
are *dependent* when they belong to the same thread, access the same variable
with at least one write, or are linked by thread management (``spawn(t)`` and
``join(t)`` are dependent with every event of ``t`` and with each other).  The
happens-before order of an execution is the smallest irreflexive partial order
that contains every dependent pair in sequence order; two executions are
equivalent when they consist of the same events and have the same
happens-before order.  :class:`Execution` maintains vector clocks so that
happens-before queries are O(1), plus the per-variable access bookkeeping that
race detection needs.

Events carry two mark bits used by the exploration algorithm: whether the
event was appended as part of an inserted schedule, and whether it is that
schedule's final event (its *head*, which happens-after everything else in the
schedule).  Marks are excluded from comparisons and fingerprints.
"""

from __future__ import annotations

import hashlib


class Event:
    """One shared-memory access or thread-management step.

    Identity is ``(thread, index)``: the ``index``-th event of ``thread``
    (1-based).  ``etype`` is one of ``"R"``, ``"W"``, ``"SPAWN"``, ``"JOIN"``;
    read-modify-writes count as writes.  ``var`` is set for R/W events and
    ``target`` for SPAWN/JOIN events.
    """

    __slots__ = ("thread", "index", "etype", "var", "target", "label", "in_schedule", "schedule_head")

    def __init__(
        self,
        thread: str,
        index: int,
        etype: str,
        var: str | None = None,
        target: str | None = None,
        label: str | None = None,
        in_schedule: bool = False,
        schedule_head: bool = False,
    ) -> None:
        self.thread = thread
        self.index = index
        self.etype = etype
        self.var = var
        self.target = target
        self.label = label if label is not None else f"{thread}.{index}"
        self.in_schedule = in_schedule
        self.schedule_head = schedule_head

    @property
    def key(self) -> tuple[str, int]:
        return (self.thread, self.index)

    def marked_copy(self, head: bool) -> "Event":
        return Event(
            self.thread,
            self.index,
            self.etype,
            var=self.var,
            target=self.target,
            label=self.label,
            in_schedule=True,
            schedule_head=head,
        )

    def describe(self) -> dict:
        return {
            "thread": self.thread,
            "index": self.index,
            "type": self.etype,
            "var": self.var,
            "target": self.target,
            "label": self.label,
        }

    def __repr__(self) -> str:
        marks = ""
        if self.in_schedule:
            marks = "+h" if self.schedule_head else "+s"
        return f"<{self.thread}.{self.index} {self.etype} {self.var or self.target or ''}{marks}>"


def dependent(a: Event, b: Event) -> bool:
    """The dependence relation: order between these two matters."""

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


# ---- executions ---------------------------------------------------------------


class Execution:
    """An event sequence with vector clocks and O(1) undo.

    Clocks are tuples indexed by thread declaration order; ``clock[i] >= k``
    means the ``k``-th event of thread ``i`` happens-before (or is) the clocked
    event.
    """

    __slots__ = (
        "thread_ids",
        "tidx",
        "events",
        "clocks",
        "var_writer",
        "var_readers",
        "thread_positions",
        "spawn_pos",
        "head_positions",
        "_undo",
    )

    def __init__(self, thread_ids: tuple[str, ...]) -> None:
        self.thread_ids = tuple(thread_ids)
        self.tidx = {t: i for i, t in enumerate(self.thread_ids)}
        self.events: list[Event] = []
        self.clocks: list[tuple[int, ...]] = []
        self.var_writer: dict[str, int] = {}
        self.var_readers: dict[str, list[int]] = {}
        self.thread_positions: dict[str, list[int]] = {}
        self.spawn_pos: dict[str, int] = {}
        self.head_positions: list[int] = []
        self._undo: list[tuple] = []

    def __len__(self) -> int:
        return len(self.events)

    # -- clock computation ----------------------------------------------------

    def candidate_clock(self, ev: Event) -> tuple[int, ...]:
        """The clock ``ev`` would get if appended now (no mutation)."""

        joined: list[int] = []
        tp = self.thread_positions.get(ev.thread)
        if tp:
            joined.append(tp[-1])
        elif ev.thread in self.spawn_pos:
            joined.append(self.spawn_pos[ev.thread])
        if ev.etype == "R":
            w = self.var_writer.get(ev.var, -1)
            if w >= 0:
                joined.append(w)
        elif ev.etype == "W":
            w = self.var_writer.get(ev.var, -1)
            if w >= 0:
                joined.append(w)
            joined.extend(self.var_readers.get(ev.var, ()))
        elif ev.etype == "JOIN":
            tps = self.thread_positions.get(ev.target)
            if tps:
                joined.append(tps[-1])
            elif ev.target in self.spawn_pos:
                joined.append(self.spawn_pos[ev.target])
        ti = self.tidx[ev.thread]
        if not joined:
            clock = [0] * len(self.thread_ids)
            clock[ti] = ev.index
            return tuple(clock)
        clock = list(self.clocks[joined[0]])
        for p in joined[1:]:
            other = self.clocks[p]
            clock = [a if a >= b else b for a, b in zip(clock, other)]
        clock[ti] = ev.index
        return tuple(clock)

    def append(self, ev: Event) -> tuple[int, ...]:
        clock = self.candidate_clock(ev)
        self.append_with_clock(ev, clock)
        return clock

    def append_with_clock(self, ev: Event, clock: tuple[int, ...]) -> None:
        pos = len(self.events)
        undo: tuple | None = None
        if ev.etype == "R":
            self.var_readers.setdefault(ev.var, []).append(pos)
            undo = ("r", ev.var)
        elif ev.etype == "W":
            prev_w = self.var_writer.get(ev.var, -1)
            prev_readers = self.var_readers.get(ev.var, [])
            self.var_writer[ev.var] = pos
            self.var_readers[ev.var] = []
            undo = ("w", ev.var, prev_w, prev_readers)
        elif ev.etype == "SPAWN":
            self.spawn_pos[ev.target] = pos
            undo = ("s", ev.target)
        self.thread_positions.setdefault(ev.thread, []).append(pos)
        if ev.schedule_head:
            self.head_positions.append(pos)
        self.events.append(ev)
        self.clocks.append(clock)
        self._undo.append(undo)

    def pop(self) -> Event:
        ev = self.events.pop()
        self.clocks.pop()
        undo = self._undo.pop()
        self.thread_positions[ev.thread].pop()
        if ev.schedule_head:
            self.head_positions.pop()
        if undo is not None:
            kind = undo[0]
            if kind == "r":
                self.var_readers[undo[1]].pop()
            elif kind == "w":
                _, var, prev_w, prev_readers = undo
                if prev_w >= 0:
                    self.var_writer[var] = prev_w
                else:
                    del self.var_writer[var]
                self.var_readers[var] = prev_readers
            else:  # spawn
                del self.spawn_pos[undo[1]]
        return ev

    # -- happens-before queries -------------------------------------------------

    def key_happens_before_clock(self, key: tuple[str, int], clock: tuple[int, ...]) -> bool:
        return clock[self.tidx[key[0]]] >= key[1]

    def happens_before(self, p: int, q: int) -> bool:
        """Does the event at position p happen-before the one at position q?"""

        if p == q:
            return False
        ev = self.events[p]
        return self.clocks[q][self.tidx[ev.thread]] >= ev.index

    def hb_predicate_for_clock(self, clock: tuple[int, ...]):
        tidx = self.tidx

        def hb(key: tuple[str, int]) -> bool:
            return clock[tidx[key[0]]] >= key[1]

        return hb


def extend_hb(execution: Execution, ev: Event) -> tuple[int, ...]:
    """Append ``ev`` and return its vector clock."""

    return execution.append(ev)


# ---- race detection -------------------------------------------------------------


def races_with_last(execution: Execution) -> list[int]:
    """Positions of events racing with the last event, descending.

    A race is a pair of conflicting shared accesses in different threads that
    are adjacent in happens-before (nothing happens between them).  spawn/join
    events have dependence edges but never race.
    """

    events = execution.events
    if not events:
        return []
    lastpos = len(events) - 1
    last = events[lastpos]
    if last.etype not in ("R", "W"):
        return []
    if last.etype == "R":
        w = execution.var_writer.get(last.var, -1)
        cands = [w] if w >= 0 else []
    else:
        undo = execution._undo[lastpos]
        _, _, prev_w, prev_readers = undo
        cands = ([prev_w] if prev_w >= 0 else []) + list(prev_readers)
    out = []
    for p in cands:
        first = events[p]
        if first.thread == last.thread:
            continue
        if _has_intermediate(execution, p, lastpos):
            continue
        out.append(p)
    out.sort(reverse=True)
    return out


def _has_intermediate(execution: Execution, p: int, q: int) -> bool:
    """Is there z with p ->hb z ->hb q (z distinct from both)?"""

    first = execution.events[p]
    fi = execution.tidx[first.thread]
    last_clock = execution.clocks[q]
    for t, positions in execution.thread_positions.items():
        ti = execution.tidx[t]
        for pos in positions:
            if pos <= p:
                continue
            if pos >= q:
                break
            if execution.clocks[pos][fi] >= first.index:
                # earliest event of t that happens-after p; check it reaches q
                if last_clock[ti] >= execution.events[pos].index:
                    return True
                break
    return False


def is_fresh(execution: Execution, first_pos: int) -> bool:
    """Freshness of the last event w.r.t. the race first event at ``first_pos``.

    Requires every schedule head strictly between the two racing events to
    happen-before the last event.  (The last event of the current execution is
    either unmarked or itself a schedule head, so the "only a head may appear
    in a schedule" condition holds by construction.)
    """

    lastpos = len(execution.events) - 1
    last = execution.events[lastpos]
    assert not last.in_schedule or last.schedule_head
    clock = execution.clocks[lastpos]
    for h in execution.head_positions:
        if h <= first_pos:
            continue
        if h >= lastpos:
            break
        ev = execution.events[h]
        if clock[execution.tidx[ev.thread]] < ev.index:
            return False
    return True


def parsimonious_races(execution: Execution) -> list[int]:
    """Races with the last event worth reversing: unmarked first event, fresh last."""

    out = []
    for p in races_with_last(execution):
        if execution.events[p].in_schedule:
            continue
        if not is_fresh(execution, p):
            continue
        out.append(p)
    return out


def schedule_closure(execution: Execution, first_pos: int) -> list[int]:
    """Positions of the happens-before closure of the last event, over the
    segment strictly after ``first_pos``; includes the last event itself."""

    lastpos = len(execution.events) - 1
    clock = execution.clocks[lastpos]
    tidx = execution.tidx
    out = []
    for q in range(first_pos + 1, lastpos):
        ev = execution.events[q]
        if clock[tidx[ev.thread]] >= ev.index:
            out.append(q)
    out.append(lastpos)
    return out


# ---- trace fingerprints ----------------------------------------------------------


def canonical_trace(events: list[Event]) -> bytes:
    """Canonical encoding of (event set, happens-before order).

    Per variable this records the write order and, for every write interval,
    the set of reads it covers; together with the event set this determines
    the happens-before relation exactly (read-read order is the only freedom).
    """

    dom = sorted((e.thread, e.index, e.etype, e.var or "", e.target or "") for e in events)
    per_var: dict[str, list] = {}
    for e in events:
        if e.var is None:
            continue
        buckets = per_var.setdefault(e.var, [[None, []]])
        if e.etype == "W":
            buckets.append([(e.thread, e.index), []])
        else:
            buckets[-1][1].append((e.thread, e.index))
    var_part = tuple(
        (var, tuple((w, tuple(sorted(rs))) for w, rs in buckets))
        for var, buckets in sorted(per_var.items())
    )
    return repr((tuple(dom), var_part)).encode()


def fingerprint_of(events: list[Event]) -> bytes:
    """Compact digest of :func:`canonical_trace`.

    Equal iff the canonical encodings are equal (up to hash collision, which
    at 128 bits is negligible next to any other failure mode); small enough
    that millions can be held in memory when comparing engines against the
    brute-force oracle.
    """

    return hashlib.blake2b(canonical_trace(events), digest_size=16).digest()


def fingerprint(execution: Execution) -> bytes:
    return fingerprint_of(execution.events)


# ---- prefix-modulo-equivalence tests ----------------------------------------------


def hb_prefix(sub: list[Event], full: list[Event]) -> bool:
    """Is ``sub`` an initial part of ``full`` up to reordering independent events?

    Holds iff some reordering of ``full`` that preserves all dependent pairs
    starts with ``sub``.
    """

    pos_in_full: dict[tuple, int] = {}
    for i, e in enumerate(full):
        pos_in_full[e.key] = i
    for e in sub:
        if e.key not in pos_in_full:
            return False
    sub_keys = {e.key for e in sub}
    for i, a in enumerate(sub):
        for b in sub[i + 1 :]:
            if dependent(a, b) and pos_in_full[a.key] > pos_in_full[b.key]:
                return False
    for j, b in enumerate(full):
        if b.key in sub_keys:
            continue
        for a in sub:
            if dependent(a, b) and j < pos_in_full[a.key]:
                return False
    return True


def compatible(a: list[Event], b: list[Event]) -> bool:
    """Do the two sequences admit a common extension (same context)?

    Events are identified across the sequences by ``(thread, index)``; shared
    events must agree on type and variable.  The sequences are compatible iff
    the union of their dependent-pair orderings is acyclic.
    """

    attrs: dict[tuple, tuple] = {}
    for e in list(a) + list(b):
        sig = (e.etype, e.var, e.target)
        prev = attrs.get(e.key)
        if prev is None:
            attrs[e.key] = sig
        elif prev != sig:
            return False
    edges: dict[tuple, set[tuple]] = {k: set() for k in attrs}
    for seq in (a, b):
        for i, x in enumerate(seq):
            for y in seq[i + 1 :]:
                if dependent(x, y) and x.key != y.key:
                    edges[x.key].add(y.key)
    # cycle detection over the union digraph
    state: dict[tuple, int] = {}
    order = list(attrs)
    for root in order:
        if state.get(root, 0):
            continue
        stack = [(root, iter(edges[root]))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                s = state.get(nxt, 0)
                if s == 1:
                    return False
                if s == 0:
                    state[nxt] = 1
                    stack.append((nxt, iter(edges[nxt])))
                    advanced = True
                    break
            if not advanced:
                state[node] = 2
                stack.pop()
    return True
