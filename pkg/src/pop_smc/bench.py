"""Generators for the benchmark programs and the random property-test corpus.

Every generator builds plain DSL text and returns it parsed, so each benchmark
round-trips through the regular front end.  ``bench_spec`` wraps a generator
invocation together with the expected number of equivalence classes where a
closed form is pinned (``None`` otherwise; callers fall back to the
brute-force oracle for small instances).
"""

from __future__ import annotations

import random
from collections.abc import Iterator
from dataclasses import dataclass
from math import comb, factorial

from .model import Program, parse_program


@dataclass(frozen=True)
class BenchSpec:
    """One benchmark instance: name, parameters, program text, and the
    expected execution count when a closed form is known."""

    name: str
    params: tuple[int, ...]
    source: str
    expected_executions: int | None

    def program(self) -> Program:
        return parse_program(self.source)


# ---- fixed programs --------------------------------------------------------------


def _fig1_text() -> str:
    return (
        "var x y z g\n"
        "thread p { store x 1; }\n"
        "thread q { store y 1; store z 1; }\n"
        "thread r { store g 1; load a y; load b x; }\n"
        "thread s { load c y; load d z; load e x; }\n"
    )


def gen_fig1() -> Program:
    """Four threads over four variables; nine events, heavily racy."""

    return parse_program(_fig1_text())


def _exp_mem3_text(n: int) -> str:
    if n < 1:
        raise ValueError("exp-mem3 requires n >= 1")
    children = [f"q{i}" for i in range(1, n + 1)]
    q_body = (
        [f"spawn {c};" for c in children]
        + [f"join {c};" for c in children]
        + ["load r x;"]
    )
    lines = ["var x y", "thread p { store x 1; }", "thread q { " + " ".join(q_body) + " }"]
    lines += [f"thread {c} {{ store y 1; }}" for c in children]
    return "\n".join(lines) + "\n"


def gen_exp_mem3(n: int) -> Program:
    """One x-writer racing a late x-read that joins n parallel y-writers.

    The y-writers commute pairwise into n! write orders, and the x accesses
    order in 2 ways, so the program has exactly 2*n! equivalence classes while
    its memory footprint stays polynomial for a parsimonious explorer.
    """

    return parse_program(_exp_mem3_text(n))


def _length_param_text(t: int, n: int) -> str:
    if t < 2:
        raise ValueError("length-param requires t >= 2")
    if n < 1:
        raise ValueError("length-param requires N >= 1")
    lines = ["var " + " ".join([f"v{i}" for i in range(t)] + ["s"])]
    for i in range(t):
        lines.append(
            f"thread p{i} {{ loop {n} {{ store v{i} 1; load r v{i}; }} store s 1; load r2 s; }}"
        )
    return "\n".join(lines) + "\n"


def gen_length_param(t: int, n: int) -> Program:
    """t threads doing N private store/load pairs, then one shared store/load.

    Only the trailing accesses to ``s`` conflict, so for t=2 the class count
    is 4 for every N; execution length grows linearly with N.
    """

    return parse_program(_length_param_text(t, n))


def _lastzero_text(n: int) -> str:
    if n < 1:
        raise ValueError("lastzero requires n >= 1")
    lines = ["var " + " ".join(f"a{j}" for j in range(n + 1))]
    for j in range(1, n + 1):
        lines.append(f"thread w{j} {{ load t a{j - 1}; store a{j} (t + 1); }}")
    parts = []
    for j in range(n, 0, -1):
        parts.append(f"load s{j} a{j}; if s{j} != 0 {{")
    parts.append("load s0 a0;")
    parts.append("}" * n)
    lines.append("thread sch { " + " ".join(parts) + " }")
    return "\n".join(lines) + "\n"


def gen_lastzero(n: int) -> Program:
    """n incrementing writers against a searcher scanning for the last zero.

    Writer j copies ``a[j-1] + 1`` into ``a[j]``; the searcher reads ``a[n]``
    down towards ``a[0]``, stopping at the first zero (``a[0]`` is never
    written, so it always terminates).
    """

    return parse_program(_lastzero_text(n))


# ---- random corpus ---------------------------------------------------------------

_VARS = ("x", "y", "z")
_REGS = ("r0", "r1", "r2")


def _random_text(
    rng: random.Random,
    max_threads: int,
    max_events: int,
    max_vars: int,
) -> str:
    nthreads = min(max_threads, rng.choices((1, 2, 3, 4), weights=(5, 40, 40, 15))[0])
    nvars = min(max_vars, rng.choices((1, 2, 3), weights=(30, 45, 25))[0])
    variables = _VARS[:nvars]
    names = [f"t{i}" for i in range(nthreads)]

    def expr(loaded: list[str]) -> str:
        roll = rng.random()
        if roll < 0.6 or not loaded:
            return str(rng.randint(0, 3))
        reg = rng.choice(loaded)
        if roll < 0.85:
            return reg
        return f"({reg} + {rng.randint(1, 2)})"

    def shared_stmt(loaded: list[str]) -> str:
        kind = rng.choices(("load", "store", "rmw"), weights=(45, 40, 15))[0]
        var = rng.choice(variables)
        if kind == "load":
            reg = rng.choice(_REGS)
            if reg not in loaded:
                loaded.append(reg)
            return f"load {reg} {var};"
        if kind == "store":
            return f"store {var} {expr(loaded)};"
        reg = rng.choice(_REGS)
        if reg not in loaded:
            loaded.append(reg)
        return f"rmw {reg} {var} ({reg} + 1);"

    def thread_body() -> list[str]:
        budget = min(max_events, rng.choices((0, 1, 2, 3, 4, 5, 6), weights=(4, 14, 26, 26, 16, 9, 5))[0])
        stmts: list[str] = []
        loaded: list[str] = []
        while budget > 0:
            roll = rng.random()
            if roll < 0.70 or budget < 2:
                stmts.append(shared_stmt(loaded))
                budget -= 1
                if loaded and rng.random() < 0.15:
                    reg = rng.choice(loaded)
                    cmp_ = rng.choice((f"{reg} < {rng.randint(1, 4)}", f"{reg} == {rng.randint(0, 2)}"))
                    stmts.append(f"assert {cmp_};")
            elif roll < 0.85 and loaded:
                reg = rng.choice(loaded)
                inner = [shared_stmt(loaded) for _ in range(rng.randint(1, 2))]
                budget -= len(inner)
                branch = f"if {reg} == {rng.randint(0, 1)} {{ " + " ".join(inner) + " }"
                if rng.random() < 0.4:
                    alt = shared_stmt(loaded)
                    budget -= 1
                    branch += f" else {{ {alt} }}"
                stmts.append(branch)
            else:
                inner = shared_stmt(loaded)
                stmts.append(f"loop 2 {{ {inner} }}")
                budget -= 2
        return stmts

    bodies = {name: thread_body() for name in names}
    if nthreads >= 2 and rng.random() < 0.25:
        spawner, target = names[0], names[-1]
        body = bodies[spawner]
        i = rng.randint(0, len(body))
        j = rng.randint(i, len(body))
        body.insert(i, f"spawn {target};")
        body.insert(j + 1, f"join {target};")
    lines = ["var " + " ".join(variables)]
    for name in names:
        body = bodies[name]
        if body:
            lines.append(f"thread {name} {{ " + " ".join(body) + " }")
        else:
            lines.append(f"thread {name} {{ }}")
    return "\n".join(lines) + "\n"


def gen_random(
    seed: int,
    *,
    max_threads: int = 4,
    max_events: int = 6,
    max_vars: int = 3,
) -> Program:
    """A small, valid, terminating program drawn deterministically from seed."""

    if not 1 <= max_threads <= 4:
        raise ValueError("max_threads must be in 1..4")
    if not 1 <= max_events <= 6:
        raise ValueError("max_events must be in 1..6")
    if not 1 <= max_vars <= 3:
        raise ValueError("max_vars must be in 1..3")
    rng = random.Random(seed)
    return parse_program(_random_text(rng, max_threads, max_events, max_vars))


# ---- corpus selection -------------------------------------------------------------

_EVENT_OPS = frozenset({"store", "load", "rmw", "spawn", "join"})

#: Largest static interleaving bound admitted into the cross-check corpus.
#: Programs above it can still be explored, but the brute-force oracle needed
#: for verification walks one execution per equivalence class, so the corpus
#: sticks to instances where that is minutes, not hours.
DESK_SCALE_BOUND = 200_000


def interleaving_bound(program: Program) -> int:
    """Static upper bound on the number of maximal interleavings.

    Counts the compiled instructions that can emit a shared event (branch
    bodies included) and returns the multinomial coefficient over the
    per-thread counts.  Conflicts are ignored, so the bound usually overshoots
    the class count by orders of magnitude, but it is monotone in program size
    and costs nothing to compute.
    """

    counts = [
        sum(1 for ins in ops if ins[0] in _EVENT_OPS)
        for ops in program.code.values()
    ]
    bound, remaining = 1, sum(counts)
    for c in counts:
        bound *= comb(remaining, c)
        remaining -= c
    return bound


def desk_corpus(
    count: int = 1000, *, start: int = 0, max_interleavings: int = DESK_SCALE_BOUND
) -> Iterator[tuple[int, Program]]:
    """Yield ``(seed, program)`` for the first ``count`` random programs whose
    interleaving bound stays within ``max_interleavings``.

    Seeds are consumed in order from ``start`` and oversized programs are
    skipped, so the corpus is reproducible from the seed sequence alone.
    """

    seed, produced = start, 0
    while produced < count:
        program = gen_random(seed)
        if interleaving_bound(program) <= max_interleavings:
            yield seed, program
            produced += 1
        seed += 1


# ---- registry -------------------------------------------------------------------


def _fig1_spec(params: tuple[int, ...]) -> BenchSpec:
    return BenchSpec("fig1", params, _fig1_text(), None)


def _exp_mem3_spec(params: tuple[int, ...]) -> BenchSpec:
    (n,) = params
    return BenchSpec("exp-mem3", params, _exp_mem3_text(n), 2 * factorial(n))


def _length_param_spec(params: tuple[int, ...]) -> BenchSpec:
    t, n = params
    return BenchSpec("length-param", params, _length_param_text(t, n), 4 if t == 2 else None)


def _lastzero_spec(params: tuple[int, ...]) -> BenchSpec:
    (n,) = params
    return BenchSpec("lastzero", params, _lastzero_text(n), 3328 if n == 10 else None)


_BUILDERS = {
    "fig1": (0, _fig1_spec),
    "exp-mem3": (1, _exp_mem3_spec),
    "length-param": (2, _length_param_spec),
    "lastzero": (1, _lastzero_spec),
}


def bench_names() -> list[str]:
    return sorted(_BUILDERS)


def bench_spec(name: str, params: tuple[int, ...]) -> BenchSpec:
    """Look up a benchmark by name and build one instance.

    Raises ``ValueError`` for unknown names, wrong parameter counts, or
    parameter values outside a generator's domain.
    """

    if name not in _BUILDERS:
        raise ValueError(f"unknown benchmark {name!r}; known: {', '.join(bench_names())}")
    arity, build = _BUILDERS[name]
    if len(params) != arity:
        raise ValueError(f"benchmark {name!r} takes {arity} parameter(s), got {len(params)}")
    return build(params)
