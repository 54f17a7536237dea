"""Benchmark generators: registry, program well-formedness, determinism."""

from __future__ import annotations

import pytest

from pop_smc.bench import (
    bench_names,
    bench_spec,
    desk_corpus,
    gen_exp_mem3,
    gen_fig1,
    gen_lastzero,
    gen_length_param,
    gen_random,
    interleaving_bound,
)
from pop_smc.model import enabled_events, initial_state, parse_program


def test_registry_lists_known_benchmarks():
    assert bench_names() == ["exp-mem3", "fig1", "lastzero", "length-param"]


def test_registry_attaches_expected_counts():
    assert bench_spec("exp-mem3", (3,)).expected_executions == 12
    assert bench_spec("exp-mem3", (7,)).expected_executions == 10080
    assert bench_spec("length-param", (2, 65536)).expected_executions == 4
    assert bench_spec("length-param", (3, 16)).expected_executions is None
    assert bench_spec("lastzero", (10,)).expected_executions == 3328
    assert bench_spec("lastzero", (4,)).expected_executions is None
    assert bench_spec("fig1", ()).expected_executions is None


def test_registry_rejects_bad_names_and_arity():
    with pytest.raises(ValueError, match="unknown benchmark"):
        bench_spec("nope", ())
    with pytest.raises(ValueError, match="parameter"):
        bench_spec("fig1", (1,))
    with pytest.raises(ValueError, match="parameter"):
        bench_spec("exp-mem3", ())


def test_generated_programs_round_trip_through_the_parser():
    for prog in (
        gen_fig1(),
        gen_exp_mem3(3),
        gen_length_param(2, 8),
        gen_lastzero(4),
        gen_random(42),
    ):
        again = parse_program(prog.source)
        assert list(again.threads) == list(prog.threads)
        assert again.vars == prog.vars


def test_worked_example_uses_four_variables():
    prog = gen_fig1()
    assert prog.vars == ("x", "y", "z", "g")
    assert len(prog.threads) == 4


def test_exponential_memory_family_shape():
    prog = gen_exp_mem3(4)
    state = initial_state(prog)
    # The writer and the spawner run initially; the n children are spawned.
    assert len(enabled_events(state)) == 2
    assert len(prog.threads) == 6


def test_length_param_execution_grows_with_n():
    short = gen_length_param(2, 1)
    long = gen_length_param(2, 64)
    assert len(long.source) > len(short.source)
    assert list(short.threads) == list(long.threads)


def test_random_programs_are_deterministic_per_seed():
    assert gen_random(17).source == gen_random(17).source
    assert gen_random(17).source != gen_random(18).source


def test_random_programs_respect_bounds():
    for seed in range(50):
        prog = gen_random(seed)
        assert 1 <= len(prog.threads) <= 4
        assert 1 <= len(prog.vars) <= 3
    with pytest.raises(ValueError):
        gen_random(0, max_threads=9)
    with pytest.raises(ValueError):
        gen_random(0, max_events=0)


def test_random_corpus_reaches_spawn_join_and_rmw():
    sources = "\n".join(gen_random(seed).source for seed in range(80))
    assert "rmw" in sources
    assert "spawn" in sources
    assert "join" in sources
