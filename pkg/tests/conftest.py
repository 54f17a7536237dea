"""Shared helpers for the test suite."""

from __future__ import annotations

import pytest

from pop_smc.model import (
    Program,
    apply_event_inplace,
    enabled_events,
    initial_state,
    parse_program,
)
from pop_smc.trace import Event, Execution


def run_schedule(program: Program, picks: list[str]) -> tuple[Execution, object]:
    """Run one interleaving, choosing the next thread by name.

    ``picks`` names the thread to step at each point; it must be enabled.
    Returns the resulting execution and the final state.
    """

    state = initial_state(program)
    ex = Execution(tuple(program.threads))
    for name in picks:
        chosen = [e for e in enabled_events(state) if e.thread == name]
        assert chosen, f"thread {name!r} is not enabled at step {len(ex.events)}"
        apply_event_inplace(state, chosen[0])
        ex.append(chosen[0])
    return ex, state


def run_to_completion(program: Program, prefer: list[str] | None = None) -> tuple[Execution, object]:
    """Run one maximal interleaving, preferring threads in ``prefer`` order."""

    order = {name: i for i, name in enumerate(prefer or [])}
    state = initial_state(program)
    ex = Execution(tuple(program.threads))
    while True:
        en = enabled_events(state)
        if not en:
            return ex, state
        ev = min(en, key=lambda e: (order.get(e.thread, len(order)), e.thread))
        apply_event_inplace(state, ev)
        ex.append(ev)


@pytest.fixture
def two_writer_reader() -> Program:
    return parse_program(
        """
        var x
        thread a { store x 1; }
        thread b { store x 2; }
        thread c { load r x; }
        """
    )
