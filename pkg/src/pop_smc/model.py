"""Parser, compiler, and interpreter for a small deterministic shared-memory language.

Programs are plain text, one statement per line, ``#`` starts a comment::

    var x y
    thread p {
        store x 1;
        load r x;
        rmw c x (c + 1);
        assert r < 2;
        spawn q;
        join q;
        if r == 0 { store x 2; } else { store x 3; }
        loop 3 { load t x; }
    }
    thread q {
        store y 1;
    }

Shared variables are declared with ``var`` and start at 0.  Identifiers that
are not declared as variables are thread-local registers (initially 0) and are
the only identifiers allowed inside expressions; shared variables can only be
accessed through ``store``/``load``/``rmw``.  Arithmetic is signed 64-bit with
wraparound.  ``rmw reg var expr`` atomically loads ``var`` into ``reg`` and
stores ``expr`` (evaluated with the fresh ``reg``) back to ``var``.

Each thread is deterministic: the only source of nondeterminism is the
interleaving of shared accesses.  ``store``/``load``/``rmw``/``spawn``/``join``
produce observable events; ``assert``/``if``/``loop`` bookkeeping is folded
into the preceding shared event of the same thread (or into thread startup),
so a purely local thread contributes no events at all.  ``loop N { ... }`` is
unrolled at compile time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .trace import Event

# ---- errors ----------------------------------------------------------------


class ParseError(Exception):
    """Raised on malformed program text; carries source position."""

    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class ProgramError(Exception):
    """Raised when a syntactically valid program breaks a static rule."""


class InvalidExecution(Exception):
    """Raised when an event sequence cannot be replayed from the initial state."""


# ---- tokens ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+|==|!=|&&|\|\||[{}();+\-*<!]")

_KEYWORDS = frozenset(
    {"var", "thread", "store", "load", "rmw", "assert", "spawn", "join", "if", "else", "loop"}
)


class Token:
    __slots__ = ("kind", "text", "line", "col", "offset")

    def __init__(self, kind: str, text: str, line: int, col: int, offset: int) -> None:
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col
        self.offset = offset

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Token({self.kind!r}, {self.text!r}, {self.line}:{self.col})"


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line = 1
    line_start = 0
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch == "\n":
            line += 1
            pos += 1
            line_start = pos
            continue
        if ch in " \t\r":
            pos += 1
            continue
        if ch == "#":
            while pos < n and text[pos] != "\n":
                pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {ch!r}", line, pos - line_start + 1)
        tok_text = m.group()
        if tok_text[0].isdigit():
            kind = "int"
        elif tok_text[0].isalpha() or tok_text[0] == "_":
            kind = "ident"
        else:
            kind = "punct"
        tokens.append(Token(kind, tok_text, line, pos - line_start + 1, pos))
        pos = m.end()
    return tokens


# ---- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Statement:
    line: int


@dataclass(frozen=True)
class Store(Statement):
    var: str
    expr: tuple


@dataclass(frozen=True)
class LoadStmt(Statement):
    reg: str
    var: str


@dataclass(frozen=True)
class Rmw(Statement):
    reg: str
    var: str
    expr: tuple


@dataclass(frozen=True)
class AssertStmt(Statement):
    expr: tuple
    text: str


@dataclass(frozen=True)
class SpawnStmt(Statement):
    target: str


@dataclass(frozen=True)
class JoinStmt(Statement):
    target: str


@dataclass(frozen=True)
class IfStmt(Statement):
    cond: tuple
    then_body: tuple
    else_body: tuple


@dataclass(frozen=True)
class LoopStmt(Statement):
    count: int
    body: tuple


@dataclass(frozen=True)
class ThreadDef:
    name: str
    body: tuple
    line: int


@dataclass
class Program:
    """A parsed, validated, and compiled program."""

    vars: tuple[str, ...]
    thread_order: tuple[str, ...]
    threads: dict[str, ThreadDef]
    code: dict[str, list[tuple]] = field(default_factory=dict)
    roots: tuple[str, ...] = ()
    spawner: dict[str, str] = field(default_factory=dict)
    source: str = ""

    @property
    def nthreads(self) -> int:
        return len(self.thread_order)


# ---- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> Token:
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else Token("punct", "", 1, 1, 0)
            raise ParseError("unexpected end of input", last.line, last.col)
        self.pos += 1
        return tok

    def _expect(self, text: str) -> Token:
        tok = self._next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def _expect_ident(self) -> Token:
        tok = self._next()
        if tok.kind != "ident" or tok.text in _KEYWORDS:
            raise ParseError(f"expected identifier, found {tok.text!r}", tok.line, tok.col)
        return tok

    def _stmt_end(self) -> None:
        # the terminating ';' may be omitted directly before a closing brace
        tok = self._peek()
        if tok is not None and tok.text == "}":
            return
        self._expect(";")

    def parse(self) -> tuple[list[str], list[ThreadDef]]:
        vars_: list[str] = []
        threads: list[ThreadDef] = []
        while (tok := self._peek()) is not None:
            if tok.text == "var":
                self._next()
                names = []
                while (nt := self._peek()) is not None and nt.kind == "ident" and nt.line == tok.line and nt.text not in _KEYWORDS:
                    names.append(self._next().text)
                if not names:
                    raise ParseError("var declaration needs at least one name", tok.line, tok.col)
                vars_.extend(names)
            elif tok.text == "thread":
                self._next()
                name = self._expect_ident()
                self._expect("{")
                body = self._parse_block()
                threads.append(ThreadDef(name.text, tuple(body), name.line))
            else:
                raise ParseError(f"expected 'var' or 'thread', found {tok.text!r}", tok.line, tok.col)
        return vars_, threads

    def _parse_block(self) -> list[Statement]:
        stmts: list[Statement] = []
        while True:
            tok = self._peek()
            if tok is None:
                raise ParseError("unterminated block", self.tokens[-1].line, self.tokens[-1].col)
            if tok.text == "}":
                self._next()
                return stmts
            stmts.append(self._parse_stmt())

    def _parse_stmt(self) -> Statement:
        tok = self._next()
        if tok.text == "store":
            var = self._expect_ident()
            expr = self._parse_expr()
            self._stmt_end()
            return Store(tok.line, var.text, expr)
        if tok.text == "load":
            reg = self._expect_ident()
            var = self._expect_ident()
            self._stmt_end()
            return LoadStmt(tok.line, reg.text, var.text)
        if tok.text == "rmw":
            reg = self._expect_ident()
            var = self._expect_ident()
            expr = self._parse_expr()
            self._stmt_end()
            return Rmw(tok.line, reg.text, var.text, expr)
        if tok.text == "assert":
            start = self._peek()
            expr = self._parse_expr()
            nxt = self._peek()
            end_off = nxt.offset if nxt is not None else len(self.text)
            text = self.text[start.offset : end_off].strip() if start else "?"
            self._stmt_end()
            return AssertStmt(tok.line, expr, text)
        if tok.text == "spawn":
            target = self._expect_ident()
            self._stmt_end()
            return SpawnStmt(tok.line, target.text)
        if tok.text == "join":
            target = self._expect_ident()
            self._stmt_end()
            return JoinStmt(tok.line, target.text)
        if tok.text == "if":
            cond = self._parse_expr()
            self._expect("{")
            then_body = self._parse_block()
            else_body: list[Statement] = []
            nxt = self._peek()
            if nxt is not None and nxt.text == "else":
                self._next()
                self._expect("{")
                else_body = self._parse_block()
            return IfStmt(tok.line, cond, tuple(then_body), tuple(else_body))
        if tok.text == "loop":
            cnt = self._next()
            if cnt.kind != "int":
                raise ParseError("loop needs an integer bound", cnt.line, cnt.col)
            self._expect("{")
            body = self._parse_block()
            return LoopStmt(tok.line, int(cnt.text), tuple(body))
        raise ParseError(f"unknown statement {tok.text!r}", tok.line, tok.col)

    # expression precedence: || < && < (== != <) < (+ -) < (*) < unary !
    def _parse_expr(self) -> tuple:
        return self._parse_or()

    def _parse_or(self) -> tuple:
        e = self._parse_and()
        while (tok := self._peek()) is not None and tok.text == "||":
            self._next()
            e = ("bin", "||", e, self._parse_and())
        return e

    def _parse_and(self) -> tuple:
        e = self._parse_cmp()
        while (tok := self._peek()) is not None and tok.text == "&&":
            self._next()
            e = ("bin", "&&", e, self._parse_cmp())
        return e

    def _parse_cmp(self) -> tuple:
        e = self._parse_add()
        while (tok := self._peek()) is not None and tok.text in ("==", "!=", "<"):
            op = self._next().text
            e = ("bin", op, e, self._parse_add())
        return e

    def _parse_add(self) -> tuple:
        e = self._parse_mul()
        while (tok := self._peek()) is not None and tok.text in ("+", "-"):
            op = self._next().text
            e = ("bin", op, e, self._parse_mul())
        return e

    def _parse_mul(self) -> tuple:
        e = self._parse_unary()
        while (tok := self._peek()) is not None and tok.text == "*":
            self._next()
            e = ("bin", "*", e, self._parse_unary())
        return e

    def _parse_unary(self) -> tuple:
        tok = self._peek()
        if tok is not None and tok.text == "!":
            self._next()
            return ("not", self._parse_unary())
        return self._parse_atom()

    def _parse_atom(self) -> tuple:
        tok = self._next()
        if tok.kind == "int":
            return ("int", int(tok.text))
        if tok.kind == "ident" and tok.text not in _KEYWORDS:
            return ("reg", tok.text)
        if tok.text == "(":
            e = self._parse_expr()
            self._expect(")")
            return e
        raise ParseError(f"expected expression, found {tok.text!r}", tok.line, tok.col)


# ---- validation and compilation ---------------------------------------------

_MAX_INSTRUCTIONS = 10_000_000


def _expr_regs(expr: tuple, out: set[str]) -> None:
    kind = expr[0]
    if kind == "reg":
        out.add(expr[1])
    elif kind == "not":
        _expr_regs(expr[1], out)
    elif kind == "bin":
        _expr_regs(expr[2], out)
        _expr_regs(expr[3], out)


def _validate(vars_: list[str], threads: list[ThreadDef]) -> None:
    if len(set(vars_)) != len(vars_):
        raise ProgramError("duplicate variable declaration")
    names = [t.name for t in threads]
    if len(set(names)) != len(names):
        raise ProgramError("duplicate thread declaration")
    varset = set(vars_)
    threadset = set(names)
    if varset & threadset:
        raise ProgramError(f"names used as both var and thread: {sorted(varset & threadset)}")

    spawn_count: dict[str, int] = {}
    edges: list[tuple[str, str]] = []

    def check_block(tname: str, body: tuple, in_loop: bool) -> None:
        for st in body:
            if isinstance(st, (Store, Rmw)):
                if st.var not in varset:
                    raise ProgramError(f"line {st.line}: store/rmw to undeclared variable {st.var!r}")
            if isinstance(st, LoadStmt) and st.var not in varset:
                raise ProgramError(f"line {st.line}: load from undeclared variable {st.var!r}")
            if isinstance(st, (LoadStmt, Rmw)) and st.reg in varset:
                raise ProgramError(f"line {st.line}: register {st.reg!r} collides with a shared variable")
            regs: set[str] = set()
            if isinstance(st, (Store, Rmw, AssertStmt)):
                _expr_regs(st.expr, regs)
            if isinstance(st, IfStmt):
                _expr_regs(st.cond, regs)
            bad = regs & varset
            if bad:
                raise ProgramError(
                    f"line {st.line}: shared variables {sorted(bad)} cannot appear in expressions; use load"
                )
            if isinstance(st, (SpawnStmt, JoinStmt)):
                if st.target not in threadset:
                    raise ProgramError(f"line {st.line}: unknown thread {st.target!r}")
            if isinstance(st, SpawnStmt):
                if st.target == tname:
                    raise ProgramError(f"line {st.line}: thread {tname!r} cannot spawn itself")
                if in_loop:
                    raise ProgramError(f"line {st.line}: spawn is not allowed inside a loop body")
                spawn_count[st.target] = spawn_count.get(st.target, 0) + 1
            if isinstance(st, JoinStmt):
                if st.target == tname:
                    raise ProgramError(f"line {st.line}: thread {tname!r} cannot join itself")
                edges.append((tname, st.target))
            if isinstance(st, IfStmt):
                check_block(tname, st.then_body, in_loop)
                check_block(tname, st.else_body, in_loop)
            if isinstance(st, LoopStmt):
                check_block(tname, st.body, True)

    for t in threads:
        check_block(t.name, t.body, False)

    for tgt, cnt in spawn_count.items():
        if cnt > 1:
            raise ProgramError(f"thread {tgt!r} is spawned by {cnt} spawn statements; at most one allowed")

    # the join waits-for graph (u joins v: u waits for v's termination) must be
    # acyclic; a cycle is a statically certain deadlock (generalizes self-join)
    adj: dict[str, list[str]] = {n: [] for n in names}
    for a, b in edges:
        adj[a].append(b)
    state: dict[str, int] = {}

    def dfs(node: str) -> None:
        state[node] = 1
        for nxt in adj[node]:
            s = state.get(nxt, 0)
            if s == 1:
                raise ProgramError(f"cyclic join dependency involving thread {nxt!r}")
            if s == 0:
                dfs(nxt)
        state[node] = 2

    for n in names:
        if state.get(n, 0) == 0:
            dfs(n)


def _label_for(st: Statement) -> str:
    if isinstance(st, Store):
        if st.expr[0] == "int":
            return f"{st.var}={st.expr[1]}"
        return f"{st.var}=*"
    if isinstance(st, LoadStmt):
        return f"{st.reg}={st.var}"
    if isinstance(st, Rmw):
        return f"{st.reg}=rmw({st.var})"
    if isinstance(st, SpawnStmt):
        return f"spawn({st.target})"
    if isinstance(st, JoinStmt):
        return f"join({st.target})"
    raise AssertionError(st)


class _Compiler:
    def __init__(self) -> None:
        self.out: list[tuple] = []
        self.total = 0

    def emit(self, ins: tuple) -> int:
        self.total += 1
        if self.total > _MAX_INSTRUCTIONS:
            raise ProgramError(f"program exceeds {_MAX_INSTRUCTIONS} compiled instructions (loop bounds too large)")
        self.out.append(ins)
        return len(self.out) - 1

    def compile_block(self, body: tuple) -> None:
        for st in body:
            if isinstance(st, Store):
                self.emit(("store", st.var, st.expr, _label_for(st)))
            elif isinstance(st, LoadStmt):
                self.emit(("load", st.reg, st.var, _label_for(st)))
            elif isinstance(st, Rmw):
                self.emit(("rmw", st.reg, st.var, st.expr, _label_for(st)))
            elif isinstance(st, AssertStmt):
                self.emit(("assert", st.expr, st.text))
            elif isinstance(st, SpawnStmt):
                self.emit(("spawn", st.target, _label_for(st)))
            elif isinstance(st, JoinStmt):
                self.emit(("join", st.target, _label_for(st)))
            elif isinstance(st, IfStmt):
                bidx = self.emit(("branch", st.cond, -1))
                self.compile_block(st.then_body)
                if st.else_body:
                    jidx = self.emit(("jump", -1))
                    self.out[bidx] = ("branch", st.cond, len(self.out))
                    self.compile_block(st.else_body)
                    self.out[jidx] = ("jump", len(self.out))
                else:
                    self.out[bidx] = ("branch", st.cond, len(self.out))
            elif isinstance(st, LoopStmt):
                for _ in range(st.count):
                    self.compile_block(st.body)
            else:  # pragma: no cover - parser produces no other nodes
                raise AssertionError(st)


def parse_program(text: str) -> Program:
    """Parse, validate, and compile program text."""

    vars_, threads = _Parser(text).parse()
    _validate(vars_, threads)
    prog = Program(
        vars=tuple(vars_),
        thread_order=tuple(t.name for t in threads),
        threads={t.name: t for t in threads},
        source=text,
    )
    spawner: dict[str, str] = {}

    def find_spawns(tname: str, body: tuple) -> None:
        for st in body:
            if isinstance(st, SpawnStmt):
                spawner[st.target] = tname
            elif isinstance(st, IfStmt):
                find_spawns(tname, st.then_body)
                find_spawns(tname, st.else_body)
            elif isinstance(st, LoopStmt):
                find_spawns(tname, st.body)

    comp_total = 0
    for t in threads:
        comp = _Compiler()
        comp.total = comp_total
        comp.compile_block(t.body)
        comp_total = comp.total
        prog.code[t.name] = comp.out
        find_spawns(t.name, t.body)
    prog.spawner = spawner
    prog.roots = tuple(n for n in prog.thread_order if n not in spawner)
    return prog


# ---- runtime state -----------------------------------------------------------

NOT_SPAWNED, RUNNABLE, TERMINATED = 0, 1, 2

_SHARED_KINDS = frozenset({"store", "load", "rmw", "spawn", "join"})
_ETYPE = {"store": "W", "load": "R", "rmw": "W", "spawn": "SPAWN", "join": "JOIN"}

_INT_MASK = (1 << 64) - 1
_INT_SIGN = 1 << 63


def _wrap(v: int) -> int:
    v &= _INT_MASK
    return v - (1 << 64) if v >= _INT_SIGN else v


def eval_expr(expr: tuple, regs: dict[str, int]) -> int:
    kind = expr[0]
    if kind == "int":
        return expr[1]
    if kind == "reg":
        return regs.get(expr[1], 0)
    if kind == "not":
        return 0 if eval_expr(expr[1], regs) != 0 else 1
    op = expr[1]
    if op == "&&":
        return 1 if eval_expr(expr[2], regs) != 0 and eval_expr(expr[3], regs) != 0 else 0
    if op == "||":
        return 1 if eval_expr(expr[2], regs) != 0 or eval_expr(expr[3], regs) != 0 else 0
    a = eval_expr(expr[2], regs)
    b = eval_expr(expr[3], regs)
    if op == "+":
        return _wrap(a + b)
    if op == "-":
        return _wrap(a - b)
    if op == "*":
        return _wrap(a * b)
    if op == "==":
        return 1 if a == b else 0
    if op == "!=":
        return 1 if a != b else 0
    if op == "<":
        return 1 if a < b else 0
    raise AssertionError(op)  # pragma: no cover


class ThreadState:
    __slots__ = ("status", "pc", "regs", "events_done")

    def __init__(self, status: int) -> None:
        self.status = status
        self.pc = 0
        self.regs: dict[str, int] = {}
        self.events_done = 0

    def snapshot(self) -> tuple:
        return (self.status, self.pc, dict(self.regs), self.events_done)

    def restore(self, snap: tuple) -> None:
        self.status, self.pc, regs, self.events_done = snap
        self.regs = dict(regs)


class GlobalState:
    """Mutable interpreter state: shared memory plus per-thread state."""

    __slots__ = ("program", "shared", "threads", "violations")

    def __init__(self, program: Program) -> None:
        self.program = program
        self.shared: dict[str, int] = {}
        self.threads: dict[str, ThreadState] = {}
        self.violations: list[str] = []

    def copy(self) -> GlobalState:
        other = GlobalState(self.program)
        other.shared = dict(self.shared)
        for name, th in self.threads.items():
            t2 = ThreadState(th.status)
            t2.pc = th.pc
            t2.regs = dict(th.regs)
            t2.events_done = th.events_done
            other.threads[name] = t2
        other.violations = list(self.violations)
        return other


def _drain_locals(state: GlobalState, name: str, record: bool) -> None:
    """Run assert/branch/jump instructions until the next shared op or the end."""

    th = state.threads[name]
    code = state.program.code[name]
    pc = th.pc
    n = len(code)
    while pc < n:
        ins = code[pc]
        kind = ins[0]
        if kind in _SHARED_KINDS:
            break
        if kind == "assert":
            if record and eval_expr(ins[1], th.regs) == 0:
                state.violations.append(f"thread {name}: assertion failed: {ins[2]}")
            pc += 1
        elif kind == "branch":
            pc = pc + 1 if eval_expr(ins[1], th.regs) != 0 else ins[2]
        else:  # jump
            pc = ins[1]
    th.pc = pc
    if pc >= n:
        th.status = TERMINATED


def initial_state(program: Program) -> GlobalState:
    state = GlobalState(program)
    state.shared = {v: 0 for v in program.vars}
    for name in program.thread_order:
        state.threads[name] = ThreadState(RUNNABLE if name in program.roots else NOT_SPAWNED)
    for name in program.roots:
        _drain_locals(state, name, True)
    return state


def _event_for(name: str, th: ThreadState, ins: tuple) -> Event:
    kind = ins[0]
    etype = _ETYPE[kind]
    if kind in ("store", "load", "rmw"):
        var = ins[1] if kind == "store" else ins[2]
        return Event(name, th.events_done + 1, etype, var=var, label=ins[-1])
    return Event(name, th.events_done + 1, etype, target=ins[1], label=ins[-1])


def enabled_events(state: GlobalState) -> list[Event]:
    """Events executable right now, in thread declaration order."""

    out: list[Event] = []
    for name in state.program.thread_order:
        th = state.threads[name]
        if th.status != RUNNABLE:
            continue
        ins = state.program.code[name][th.pc]
        if ins[0] == "join" and state.threads[ins[1]].status != TERMINATED:
            continue
        out.append(_event_for(name, th, ins))
    return out


def _event_matches(ev: Event, ins: tuple) -> bool:
    kind = ins[0]
    if _ETYPE.get(kind) != ev.etype:
        return False
    if kind == "store":
        return ev.var == ins[1]
    if kind in ("load", "rmw"):
        return ev.var == ins[2]
    return ev.target == ins[1]


def apply_event_inplace(state: GlobalState, ev: Event, record: bool = True) -> tuple:
    """Execute ``ev`` plus its trailing local instructions; return an undo token."""

    th = state.threads.get(ev.thread)
    if th is None or th.status != RUNNABLE:
        raise InvalidExecution(f"thread {ev.thread!r} is not runnable")
    if ev.index != th.events_done + 1:
        raise InvalidExecution(f"event index {ev.index} out of order for thread {ev.thread!r}")
    ins = state.program.code[ev.thread][th.pc]
    if not _event_matches(ev, ins):
        raise InvalidExecution(f"event {ev!r} does not match pending instruction {ins!r}")

    th_snap = th.snapshot()
    tgt_name: str | None = None
    tgt_snap: tuple | None = None
    var: str | None = None
    old = 0

    kind = ins[0]
    if kind == "store":
        var = ins[1]
        old = state.shared[var]
        state.shared[var] = _wrap(eval_expr(ins[2], th.regs))
    elif kind == "load":
        th.regs[ins[1]] = state.shared[ins[2]]
    elif kind == "rmw":
        var = ins[2]
        old = state.shared[var]
        th.regs[ins[1]] = old
        state.shared[var] = _wrap(eval_expr(ins[3], th.regs))
    elif kind == "spawn":
        tgt_name = ins[1]
        tgt = state.threads[tgt_name]
        if tgt.status != NOT_SPAWNED:
            raise InvalidExecution(f"thread {tgt_name!r} spawned twice")
        tgt_snap = tgt.snapshot()
        tgt.status = RUNNABLE
        _drain_locals(state, tgt_name, record)
    else:  # join
        if state.threads[ins[1]].status != TERMINATED:
            raise InvalidExecution(f"join on live thread {ins[1]!r}")

    th.events_done += 1
    th.pc += 1
    _drain_locals(state, ev.thread, record)
    return (ev.thread, th_snap, tgt_name, tgt_snap, var, old)


def undo_event(state: GlobalState, token: tuple) -> None:
    name, th_snap, tgt_name, tgt_snap, var, old = token
    state.threads[name].restore(th_snap)
    if tgt_name is not None:
        state.threads[tgt_name].restore(tgt_snap)
    if var is not None:
        state.shared[var] = old


def apply_event(state: GlobalState, ev: Event) -> GlobalState:
    """Functional flavor of :func:`apply_event_inplace`."""

    nxt = state.copy()
    apply_event_inplace(nxt, ev)
    return nxt


def replay(program: Program, events: list[Event]) -> GlobalState:
    """Replay an event sequence from the initial state; raise if infeasible."""

    state = initial_state(program)
    for ev in events:
        apply_event_inplace(state, ev)
    return state
