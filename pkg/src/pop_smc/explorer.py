"""The exploration engine: eager race reversal over sleep-set-guarded schedules.

``explore`` walks the scheduling tree of a program depth-first, one maximal
execution per happens-before class.  At every prefix it first reverses each
parsimonious race against the last event — building the inserted schedule,
gating it against the prefix's sleep-set state, and descending into the new
branch immediately — and only then extends the prefix by one admissible
enabled event.  The recursion of that description is simulated with an
explicit frame stack so execution length is never limited by the interpreter
stack; program and bookkeeping state are mutated in place on the way down and
restored from undo tokens on the way back.

Two interchangeable sleep-set representations drive the gates: the symbolic
expression sets (``algorithm="pop"``) and the verbatim schedule store
(``algorithm="pop-explicit"``); both must produce the same executions in the
same order.  ``brute_force_classes`` enumerates interleavings outright (with
equivalent-prefix pruning) and serves as the ground-truth class oracle;
``verify_optimality`` runs all three and cross-checks them.
"""

from __future__ import annotations

import hashlib
import logging
import time
from dataclasses import dataclass, field

from .model import (
    GlobalState,
    Program,
    apply_event_inplace,
    enabled_events,
    initial_state,
    parse_program,
    undo_event,
)
from .sleepsets import (
    explicit_event,
    mk_sched_char,
    mk_stored_char,
    stored_weight,
    upd_event,
    view_of,
)
from .trace import (
    Event,
    Execution,
    fingerprint,
    fingerprint_of,
    parsimonious_races,
    schedule_closure,
)

log = logging.getLogger("pop_smc.explorer")

_ALGORITHMS = {
    "pop": "pop",
    "pop-explicit": "pop-explicit",
    "pop-explicit-sleep": "pop-explicit",
    "brute": "brute",
    "brute-force": "brute",
}

_MAX_WITNESSES = 10


class InvariantViolation(Exception):
    """A structural property of the algorithm failed; carries a repro prefix."""

    def __init__(self, message: str, prefix: list[str]) -> None:
        super().__init__(message)
        self.prefix = prefix


class LimitExceeded(Exception):
    """An exploration limit was hit; carries the partial report."""

    def __init__(self, reason: str, report: "Report") -> None:
        super().__init__(f"exploration limit exceeded: {reason}")
        self.reason = reason
        self.report = report


@dataclass
class ExploreConfig:
    algorithm: str = "pop"
    invariants: int = 1
    max_execs: int | None = None
    max_seconds: float | None = None
    # False: do not collect executed sequences.  "full" (or True): keep each
    # execution's event labels verbatim.  "digest": keep a 16-byte digest per
    # execution -- order-faithful but bounded memory for million-class runs.
    collect_sequences: bool | str = False
    dot: str | None = None

    def __post_init__(self) -> None:
        if self.algorithm not in _ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        self.algorithm = _ALGORITHMS[self.algorithm]
        if self.collect_sequences is True:
            self.collect_sequences = "full"
        if self.collect_sequences not in (False, "full", "digest"):
            raise ValueError("collect_sequences must be False, 'full', or 'digest'")
        if self.invariants not in (0, 1, 2):
            raise ValueError("invariants level must be 0, 1, or 2")
        if self.max_execs is not None and self.max_execs <= 0:
            raise ValueError("max_execs must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")


@dataclass
class Report:
    algorithm: str
    executions: int = 0
    distinct_traces: int = 0
    assertion_violations: list[dict] = field(default_factory=list)
    blocked_reversals: int = 0
    reversals: int = 0
    max_reversal_depth: int = 0
    max_sschar_size: int = 0
    blocked_with_enabled: int = 0
    longest_execution: int = 0
    peak_frames: int = 0
    peak_expressions: int = 0
    peak_schedules: int = 0
    wall_ms: float = 0.0
    limit_exceeded: str | None = None
    # In-memory extras (not serialized): fingerprints in completion order and,
    # when requested, the executed event sequences in the same order (label
    # tuples or per-execution digests, per ExploreConfig.collect_sequences).
    fingerprints: list[bytes] = field(default_factory=list)
    sequences: list[tuple[str, ...]] | list[bytes] | None = None

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "executions": self.executions,
            "distinct_traces": self.distinct_traces,
            "assertion_violations": self.assertion_violations,
            "blocked_reversals": self.blocked_reversals,
            "reversals": self.reversals,
            "max_reversal_depth": self.max_reversal_depth,
            "max_sschar_size": self.max_sschar_size,
            "blocked_with_enabled": self.blocked_with_enabled,
            "longest_execution": self.longest_execution,
            "peak_frames": self.peak_frames,
            "peak_expressions": self.peak_expressions,
            "peak_schedules": self.peak_schedules,
            "wall_ms": round(self.wall_ms, 3),
            "limit_exceeded": self.limit_exceeded,
        }


def _sequence_of(events: list[Event]) -> tuple[str, ...]:
    return tuple(f"{e.thread}.{e.index}:{e.label}" for e in events)


def _sequence_digest(events: list[Event]) -> bytes:
    return hashlib.blake2b("\x00".join(_sequence_of(events)).encode(), digest_size=16).digest()


def _record_sequence(report: Report, mode: bool | str, events: list[Event]) -> None:
    if report.sequences is not None:
        report.sequences.append(
            _sequence_of(events) if mode == "full" else _sequence_digest(events)
        )


# ---- sleep-set backends ------------------------------------------------------------


class _ExpressionBackend:
    """Symbolic sleep sets: per-prefix expression sets."""

    name = "pop"

    def root(self):
        return frozenset()

    def step(self, entry, view, hb):
        return upd_event(view, hb, entry)

    def make_char(self, items, var, views):
        return mk_sched_char(items, var, views[-1])

    def entry_weight(self, entry) -> int:
        return len(entry)


class _ExplicitBackend:
    """Verbatim sleep sets: stored-record sets listing forbidden schedules."""

    name = "pop-explicit"

    def root(self):
        return frozenset()

    def step(self, entry, view, hb):
        return explicit_event(view, hb, entry)

    def make_char(self, items, var, views):
        return mk_stored_char(items, var, views)

    def entry_weight(self, entry) -> int:
        return sum(stored_weight(rec) for rec in entry)


# ---- engine ------------------------------------------------------------------------


class _Job:
    __slots__ = ("p", "sigma", "views", "items", "var", "head_is_read")

    def __init__(self, p, sigma, views, items, var, head_is_read) -> None:
        self.p = p
        self.sigma = sigma
        self.views = views
        self.items = items
        self.var = var
        self.head_is_read = head_is_read


_ENTER, _RACES, _EXTEND, _DONE = 0, 1, 2, 3


class _Frame:
    __slots__ = ("kind", "stage", "jobs", "job_idx", "saved", "saved_start", "enabled",
                 "job", "uid", "sigma_len", "node_id")

    def __init__(self, kind: str) -> None:
        self.kind = kind  # "root" | "sigma" | "ext"
        self.stage = _ENTER
        self.jobs: list[_Job] = []
        self.job_idx = 0
        self.saved = None
        self.saved_start = 0
        self.enabled: list[Event] = []
        self.job: _Job | None = None
        self.uid = None
        self.sigma_len = 0
        self.node_id = 0


class _Engine:
    def __init__(self, program: Program, cfg: ExploreConfig) -> None:
        self.program = program
        self.cfg = cfg
        self.backend = _ExpressionBackend() if cfg.algorithm == "pop" else _ExplicitBackend()
        self.report = Report(algorithm=cfg.algorithm)
        if cfg.collect_sequences:
            self.report.sequences = []
        self.state: GlobalState = initial_state(program)
        self.execution = Execution(program.thread_order)
        self.token_stack: list[tuple] = []
        self.unit_id_at: list[int | None] = []
        self.schar_stack: list = [self.backend.root()]
        self.live_entries = 0
        self.live_weight = 0
        self.peak_weight = 0
        # uid -> (position of the inserted schedule's head, its stored
        # characterization; None when the head is a write)
        self.units: dict[int, tuple[int, frozenset | None]] = {}
        self._next_uid = 1
        self.stack: list[_Frame] = []
        self.reversal_depth = 0
        self.fingerprint_set: set[bytes] = set()
        self.violation_witness: dict[str, list[str]] = {}
        self.t0 = time.monotonic()
        # optional exploration-tree capture
        self.collect_tree = cfg.dot is not None
        self.tree_nodes: dict[int, tuple[str, bool]] = {}
        self.tree_edges: list[tuple[int, int, str, str]] = []
        self._next_node = 0

    # -- primitive path operations ----------------------------------------------

    def _schar_push(self, entry) -> None:
        self.schar_stack.append(entry)
        self.live_entries += len(entry)
        self.live_weight += self.backend.entry_weight(entry)
        n = len(entry)
        if n > self.report.max_sschar_size:
            self.report.max_sschar_size = n
        if self.live_entries > self.report.peak_expressions:
            self.report.peak_expressions = self.live_entries
        if self.live_weight > self.peak_weight:
            self.peak_weight = self.live_weight

    def _schar_replace_top(self, entry) -> None:
        old = self.schar_stack[-1]
        self.live_entries += len(entry) - len(old)
        self.live_weight += self.backend.entry_weight(entry) - self.backend.entry_weight(old)
        self.schar_stack[-1] = entry
        n = len(entry)
        if n > self.report.max_sschar_size:
            self.report.max_sschar_size = n
        if self.live_entries > self.report.peak_expressions:
            self.report.peak_expressions = self.live_entries
        if self.live_weight > self.peak_weight:
            self.peak_weight = self.live_weight

    def _pop_event(self) -> Event:
        undo_event(self.state, self.token_stack.pop())
        self.unit_id_at.pop()
        entry = self.schar_stack.pop()
        self.live_entries -= len(entry)
        self.live_weight -= self.backend.entry_weight(entry)
        return self.execution.pop()

    def _drain_violations(self) -> None:
        vs = self.state.violations
        if not vs:
            return
        for msg in vs:
            if msg not in self.violation_witness:
                self.violation_witness[msg] = [f"{e.thread}.{e.index}:{e.label}" for e in self.execution.events]
        vs.clear()

    def _check_time(self) -> None:
        if self.cfg.max_seconds is not None and time.monotonic() - self.t0 > self.cfg.max_seconds:
            raise LimitExceeded("seconds", self._finish("seconds"))

    # -- tree capture --------------------------------------------------------------

    def _new_node(self, parent: int | None, style: str, edge_label: str) -> int:
        nid = self._next_node
        self._next_node += 1
        if self.collect_tree:
            prefix = " ".join(e.label for e in self.execution.events) or "<empty>"
            self.tree_nodes[nid] = (prefix, False)
            if parent is not None:
                self.tree_edges.append((parent, nid, style, edge_label))
        return nid

    def _mark_maximal(self, nid: int) -> None:
        if self.collect_tree:
            prefix, _ = self.tree_nodes[nid]
            self.tree_nodes[nid] = (prefix, True)

    def dot_text(self) -> str:
        def esc(s: str) -> str:
            return s.replace("\\", "\\\\").replace('"', '\\"')

        lines = ["digraph exploration {", '  node [shape=box fontname="monospace"];']
        for nid, (prefix, maximal) in self.tree_nodes.items():
            extra = " peripheries=2" if maximal else ""
            lines.append(f'  n{nid} [label="{esc(prefix)}"{extra}];')
        for pid, cid, style, elabel in self.tree_edges:
            lines.append(f'  n{pid} -> n{cid} [style={style} label="{esc(elabel)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    # -- frame lifecycle -------------------------------------------------------------

    def run(self) -> Report:
        self._drain_violations()
        root = _Frame("root")
        root.node_id = self._new_node(None, "solid", "")
        self._enter(root)
        while self.stack:
            fr = self.stack[-1]
            if fr.stage == _RACES:
                if not self._start_next_job(fr):
                    self._restore_segment(fr)
                    fr.stage = _EXTEND
            elif fr.stage == _EXTEND:
                fr.stage = _DONE
                self._extend(fr)
            else:  # _DONE
                self.stack.pop()
                self._teardown(fr)
        return self._finish(None)

    def _enter(self, fr: _Frame) -> None:
        self.stack.append(fr)
        if len(self.stack) > self.report.peak_frames:
            self.report.peak_frames = len(self.stack)
        if fr.kind == "sigma":
            self.reversal_depth += 1
            if self.reversal_depth > self.report.max_reversal_depth:
                self.report.max_reversal_depth = self.reversal_depth
        self._check_time()
        fr.enabled = enabled_events(self.state)
        if not fr.enabled:
            self._record_maximal(fr)
        self._compute_jobs(fr)
        fr.stage = _RACES

    def _record_maximal(self, fr: _Frame) -> None:
        self.report.executions += 1
        fp = fingerprint(self.execution)
        self.report.fingerprints.append(fp)
        self.fingerprint_set.add(fp)
        if len(self.execution) > self.report.longest_execution:
            self.report.longest_execution = len(self.execution)
        _record_sequence(self.report, self.cfg.collect_sequences, self.execution.events)
        self._mark_maximal(fr.node_id)
        if self.cfg.max_execs is not None and self.report.executions >= self.cfg.max_execs:
            raise LimitExceeded("executions", self._finish("executions"))

    def _compute_jobs(self, fr: _Frame) -> None:
        if not self.execution.events:
            return
        races = parsimonious_races(self.execution)
        if not races:
            return
        ex = self.execution
        last = ex.events[-1]
        lastpos = len(ex.events) - 1
        for p in races:
            closure = schedule_closure(ex, p)
            closure_set = set(closure)
            sigma = [ex.events[q].marked_copy(head=(q == lastpos)) for q in closure]
            views = [view_of(e) for e in sigma]
            head_is_read = last.etype == "R"
            items = None
            if head_is_read:
                items = self._sched_char_items(p, lastpos, closure_set)
            fr.jobs.append(_Job(p, sigma, views, items, last.var, head_is_read))
        # save the segment that race processing will pop (events, clocks, unit
        # tags, and sleep-set entries are restored verbatim afterwards)
        fr.saved_start = fr.jobs[-1].p  # races are in descending-position order
        fr.saved = [
            (ex.events[i], ex.clocks[i], self.unit_id_at[i], self.schar_stack[i + 1])
            for i in range(fr.saved_start, len(ex.events))
        ]

    def _sched_char_items(self, p: int, lastpos: int, closure_set: set) -> list[tuple]:
        """Walk the segment between the racing events, classifying leftover
        events and previously inserted schedules for ``mk_sched_char``."""

        events = self.execution.events
        units = self.units
        items: list[tuple] = []
        q = p + 1
        check = self.cfg.invariants >= 2
        while q < lastpos:
            uid = self.unit_id_at[q]
            if uid is not None:
                head_pos, char = units[uid]
                if head_pos < lastpos:
                    if check and not all(r in closure_set for r in range(q, head_pos)):
                        raise InvariantViolation(
                            "inserted schedule between racing events not contained in the new schedule",
                            [e.label for e in events],
                        )
                    items.append(("head", view_of(events[head_pos]), char))
                    q = head_pos + 1
                    continue
            if q not in closure_set:
                items.append(("w", view_of(events[q])))
            q += 1
        uid = self.unit_id_at[lastpos]
        if uid is not None:
            # The racing read is itself the head of an inserted schedule: the
            # new schedule re-reverses it against an earlier write, so the old
            # schedule's characterization is inherited under the full pattern.
            head_pos, char = units[uid]
            if check and head_pos != lastpos:
                raise InvariantViolation(
                    "racing read lies inside an inserted schedule but is not its head",
                    [e.label for e in events],
                )
            items.append(("chain", char))
        return items

    def _start_next_job(self, fr: _Frame) -> bool:
        while fr.job_idx < len(fr.jobs):
            job = fr.jobs[fr.job_idx]
            fr.job_idx += 1
            while len(self.execution) > job.p:
                self._pop_event()
            if self._push_sigma(fr, job):
                return True
            self.report.blocked_reversals += 1
        return False

    def _push_sigma(self, parent: _Frame, job: _Job) -> bool:
        """Gate the schedule against the prefix and descend into it if allowed."""

        entry = self.schar_stack[-1]
        pushed = 0
        blocked = False
        for ev in job.sigma:
            token = apply_event_inplace(self.state, ev, record=ev.schedule_head)
            clock = self.execution.append(ev)
            self.token_stack.append(token)
            self.unit_id_at.append(None)
            pushed += 1
            hb = self.execution.hb_predicate_for_clock(clock)
            blocked, entry = self.backend.step(entry, view_of(ev), hb)
            self._schar_push(entry)
            if blocked:
                break
        if blocked:
            # The head is the only schedule event applied with recording on; if
            # the gate rejected the schedule at the head, its assertion failures
            # are unwound along with the events.
            self.state.violations.clear()
            for _ in range(pushed):
                self._pop_event()
            return False
        self._drain_violations()
        if self.cfg.invariants >= 2:
            head_clock = self.execution.clocks[-1]
            for v in job.views:
                if not self.execution.key_happens_before_clock(v.key, head_clock):
                    raise InvariantViolation(
                        "inserted schedule is not happens-before-closed under its head",
                        [e.label for e in self.execution.events],
                    )
        uid = self._next_uid
        self._next_uid += 1
        phi = None
        if job.head_is_read:
            phi = self.backend.make_char(job.items, job.var, job.views)
            self._schar_replace_top(self.schar_stack[-1] | phi)
        self.units[uid] = (job.p + len(job.views) - 1, phi)
        for i in range(len(self.unit_id_at) - pushed, len(self.unit_id_at)):
            self.unit_id_at[i] = uid
        self.report.reversals += 1
        if log.isEnabledFor(logging.DEBUG):
            log.debug("reversal at %d: sigma=%s", job.p, "·".join(v.label for v in job.views))
        child = _Frame("sigma")
        child.job = job
        child.uid = uid
        child.sigma_len = pushed
        child.node_id = self._new_node(parent.node_id, "dashed", "~ " + " ".join(v.label for v in job.views))
        self._enter(child)
        return True

    def _restore_segment(self, fr: _Frame) -> None:
        if fr.saved is None:
            return
        start = len(self.execution)
        for ev, clock, uid, entry in fr.saved[start - fr.saved_start :]:
            token = apply_event_inplace(self.state, ev, record=False)
            self.execution.append_with_clock(ev, clock)
            self.token_stack.append(token)
            self.unit_id_at.append(uid)
            self._schar_push(entry)

    def _extend(self, fr: _Frame) -> None:
        if not fr.enabled:
            return
        entry = self.schar_stack[-1]
        for ev in fr.enabled:
            clock = self.execution.candidate_clock(ev)
            hb = self.execution.hb_predicate_for_clock(clock)
            blocked, new_entry = self.backend.step(entry, view_of(ev), hb)
            if blocked:
                continue
            token = apply_event_inplace(self.state, ev, record=True)
            self.execution.append_with_clock(ev, clock)
            self.token_stack.append(token)
            self.unit_id_at.append(None)
            self._schar_push(new_entry)
            self._drain_violations()
            child = _Frame("ext")
            child.node_id = self._new_node(fr.node_id, "solid", ev.label)
            self._enter(child)
            return
        # nothing admissible although the execution is not maximal
        self.report.blocked_with_enabled += 1
        if self.cfg.invariants >= 1:
            raise InvariantViolation(
                "no admissible extension although enabled events remain",
                [f"{e.thread}.{e.index}:{e.label}" for e in self.execution.events],
            )

    def _teardown(self, fr: _Frame) -> None:
        if fr.kind == "sigma":
            for _ in range(fr.sigma_len):
                self._pop_event()
            del self.units[fr.uid]
            self.reversal_depth -= 1
        elif fr.kind == "ext":
            self._pop_event()

    def _finish(self, limit: str | None) -> Report:
        rep = self.report
        rep.limit_exceeded = limit
        rep.distinct_traces = len(self.fingerprint_set)
        rep.assertion_violations = [
            {"message": m, "witness": w}
            for m, w in list(self.violation_witness.items())[:_MAX_WITNESSES]
        ]
        if isinstance(self.backend, _ExplicitBackend):
            rep.peak_schedules = self.peak_weight
        if limit is None and self.cfg.invariants >= 1:
            n = rep.longest_execution
            if rep.max_reversal_depth > n * (n - 1) // 2:
                raise InvariantViolation(
                    f"race-reversal depth {rep.max_reversal_depth} exceeds n(n-1)/2 for n={n}", []
                )
            if self.backend.name == "pop" and rep.max_sschar_size > max(n, 1) ** 2:
                raise InvariantViolation(
                    f"sleep-set characterization size {rep.max_sschar_size} exceeds n^2 for n={n}", []
                )
        return rep


# ---- brute force -------------------------------------------------------------------


def _explore_brute(program: Program, cfg: ExploreConfig) -> Report:
    report = Report(algorithm="brute")
    if cfg.collect_sequences:
        report.sequences = []
    state = initial_state(program)
    execution = Execution(program.thread_order)
    witness: dict[str, list[str]] = {}

    def drain() -> None:
        for msg in state.violations:
            if msg not in witness:
                witness[msg] = [f"{e.thread}.{e.index}:{e.label}" for e in execution.events]
        state.violations.clear()

    drain()
    seen: set[bytes] = set()
    classes: set[bytes] = set()
    t0 = time.monotonic()
    # frame = [candidates, next index, owns_event]
    stack: list[list] = [[enabled_events(state), 0, False]]
    token_stack: list[tuple] = []
    if not stack[0][0]:
        report.executions += 1
        fp = fingerprint(execution)
        classes.add(fp)
        report.fingerprints.append(fp)
        _record_sequence(report, cfg.collect_sequences, [])
    ticks = 0
    while stack:
        ticks += 1
        if (
            cfg.max_seconds is not None
            and ticks % 4096 == 0
            and time.monotonic() - t0 > cfg.max_seconds
        ):
            report.limit_exceeded = "seconds"
            break
        fr = stack[-1]
        if fr[1] >= len(fr[0]):
            stack.pop()
            if fr[2]:
                undo_event(state, token_stack.pop())
                execution.pop()
            continue
        ev = fr[0][fr[1]]
        fr[1] += 1
        token = apply_event_inplace(state, ev, record=True)
        execution.append(ev)
        drain()
        fp = fingerprint(execution)
        if fp in seen:
            undo_event(state, token)
            execution.pop()
            continue
        seen.add(fp)
        token_stack.append(token)
        cands = enabled_events(state)
        if not cands:
            report.executions += 1
            classes.add(fp)
            report.fingerprints.append(fp)
            if len(execution) > report.longest_execution:
                report.longest_execution = len(execution)
            _record_sequence(report, cfg.collect_sequences, execution.events)
            if cfg.max_execs is not None and report.executions >= cfg.max_execs:
                report.limit_exceeded = "executions"
                break
            if cfg.max_seconds is not None and time.monotonic() - t0 > cfg.max_seconds:
                report.limit_exceeded = "seconds"
                break
        stack.append([cands, 0, True])
    report.distinct_traces = len(classes)
    report.assertion_violations = [
        {"message": m, "witness": w} for m, w in list(witness.items())[:_MAX_WITNESSES]
    ]
    if report.limit_exceeded is not None:
        raise LimitExceeded(report.limit_exceeded, report)
    return report


def brute_force_classes(
    program: Program | str,
    max_execs: int | None = None,
    max_seconds: float | None = None,
) -> set[bytes]:
    """The set of happens-before-class fingerprints of all maximal executions."""

    if isinstance(program, str):
        program = parse_program(program)
    cfg = ExploreConfig(algorithm="brute", max_execs=max_execs, max_seconds=max_seconds)
    return set(_explore_brute(program, cfg).fingerprints)


# ---- public entry points --------------------------------------------------------------


def explore(program: Program | str, cfg: ExploreConfig | None = None) -> Report:
    """Run one algorithm over a program and return its report."""

    if isinstance(program, str):
        program = parse_program(program)
    if cfg is None:
        cfg = ExploreConfig()
    t0 = time.monotonic()
    if cfg.algorithm == "brute":
        try:
            report = _explore_brute(program, cfg)
        except LimitExceeded as exc:
            exc.report.wall_ms = (time.monotonic() - t0) * 1000.0
            raise
        report.wall_ms = (time.monotonic() - t0) * 1000.0
        return report
    engine = _Engine(program, cfg)
    try:
        report = engine.run()
    except LimitExceeded as exc:
        exc.report.wall_ms = (time.monotonic() - t0) * 1000.0
        raise
    report.wall_ms = (time.monotonic() - t0) * 1000.0
    if cfg.dot is not None:
        with open(cfg.dot, "w", encoding="utf-8") as fh:
            fh.write(engine.dot_text())
    return report


def _recover_sequence(program: Program, algorithm: str, invariants: int, index: int) -> list[str]:
    """Re-run one deterministic engine to read back execution ``index``'s labels.

    Used only to attach human-readable witnesses to verification failures;
    normal verification keeps digests to stay within memory on large runs.
    """

    cfg = ExploreConfig(
        algorithm=algorithm,
        invariants=invariants,
        max_execs=index + 1,
        collect_sequences="full",
    )
    try:
        report = explore(program, cfg)
    except LimitExceeded as exc:
        report = exc.report
    if report.sequences is not None and len(report.sequences) > index:
        return list(report.sequences[index])
    return []


def verify_optimality(
    program: Program | str,
    max_execs: int | None = None,
    max_seconds: float | None = None,
    invariants: int = 1,
) -> dict:
    """Cross-check the three algorithms on one program.

    Verifies that the explored class set equals the brute-force class set,
    that the number of explored executions equals the number of classes, and
    that both sleep-set representations produce identical execution sequences
    in identical order.  Returns a verdict dict with any failures described.
    """

    if isinstance(program, str):
        program = parse_program(program)

    def run(alg: str) -> Report:
        return explore(
            program,
            ExploreConfig(
                algorithm=alg,
                invariants=invariants,
                max_execs=max_execs,
                max_seconds=max_seconds,
                collect_sequences="digest",
            ),
        )

    pop = run("pop")
    expl = run("pop-explicit")
    brute = run("brute")
    failures: list[dict] = []
    pop_set = set(pop.fingerprints)
    oracle_set = set(brute.fingerprints)
    if pop_set != oracle_set:
        missing = sorted(oracle_set - pop_set)
        extra = sorted(pop_set - oracle_set)
        detail: dict = {"check": "class-set"}
        if missing:
            fp = missing[0]
            detail["missing_class"] = fp.hex()
            idx = brute.fingerprints.index(fp)
            detail["oracle_witness"] = _recover_sequence(program, "brute", invariants, idx)
        if extra:
            fp = extra[0]
            detail["unexpected_class"] = fp.hex()
            idx = pop.fingerprints.index(fp)
            detail["pop_witness"] = _recover_sequence(program, "pop", invariants, idx)
        failures.append(detail)
    if pop.executions != len(oracle_set):
        failures.append(
            {
                "check": "optimality",
                "pop_executions": pop.executions,
                "classes": len(oracle_set),
            }
        )
    if pop.sequences != expl.sequences:
        detail = {"check": "sleep-set-differential"}
        for i, (a, b) in enumerate(zip(pop.sequences, expl.sequences)):
            if a != b:
                detail["index"] = i
                detail["pop"] = _recover_sequence(program, "pop", invariants, i)
                detail["pop_explicit"] = _recover_sequence(program, "pop-explicit", invariants, i)
                break
        else:
            detail["index"] = min(len(pop.sequences), len(expl.sequences))
            detail["pop_count"] = len(pop.sequences)
            detail["pop_explicit_count"] = len(expl.sequences)
        failures.append(detail)
    for rep in (pop, expl):
        if rep.blocked_with_enabled:
            failures.append({"check": "non-blocking", "algorithm": rep.algorithm, "count": rep.blocked_with_enabled})
    return {
        "ok": not failures,
        "classes": len(oracle_set),
        "pop_executions": pop.executions,
        "pop_explicit_executions": expl.executions,
        "failures": failures,
        "reports": {"pop": pop, "pop-explicit": expl, "brute": brute},
    }
