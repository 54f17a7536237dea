"""End-to-end exploration: optimality, engine agreement, limits, reporting."""

from __future__ import annotations

import math
import os

import pytest

from pop_smc.bench import gen_exp_mem3, gen_fig1, gen_random
from pop_smc.explorer import (
    ExploreConfig,
    LimitExceeded,
    Report,
    brute_force_classes,
    explore,
    verify_optimality,
)

RACY_TRIO = """
var x
thread a { store x 1; }
thread b { store x 2; }
thread c { load r x; }
"""

CHAINED_READS = """
var x
thread a { store x 3; store x 1; }
thread b { load r x; }
thread c { store x 7; load r x; }
"""

DEPENDENT_COMPLETION = """
var x y
thread a { store y 0; }
thread b { load r2 x; load r0 y; }
thread c { load r2 y; rmw r1 x (r1 + 1); }
"""


def pop(program, **kw) -> Report:
    return explore(program, ExploreConfig(algorithm="pop", **kw))


# ---- optimality on fixed programs --------------------------------------------------


@pytest.mark.parametrize(
    "text, classes",
    [(RACY_TRIO, 6), (CHAINED_READS, 24), (DEPENDENT_COMPLETION, 7)],
)
def test_explores_each_class_exactly_once(text, classes):
    oracle = brute_force_classes(text)
    assert len(oracle) == classes
    rep = pop(text)
    assert rep.executions == classes
    assert set(rep.fingerprints) == oracle
    assert len(rep.fingerprints) == len(set(rep.fingerprints))


def test_worked_example_has_thirty_two_classes():
    prog = gen_fig1()
    rep = pop(prog)
    assert rep.executions == 32
    assert set(rep.fingerprints) == brute_force_classes(prog)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_exponential_memory_family_counts(n):
    assert pop(gen_exp_mem3(n)).executions == 2 * math.factorial(n)


def test_verify_optimality_verdict_shape():
    verdict = verify_optimality(RACY_TRIO)
    assert verdict["ok"] is True
    assert verdict["classes"] == 6
    assert verdict["pop_executions"] == 6
    assert verdict["pop_explicit_executions"] == 6
    assert verdict["failures"] == []
    assert set(verdict["reports"]) == {"pop", "pop-explicit", "brute"}


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 56])
def test_verify_optimality_on_random_programs(seed):
    verdict = verify_optimality(gen_random(seed))
    assert verdict["ok"], verdict["failures"]


# ---- engine agreement ----------------------------------------------------------------


@pytest.mark.parametrize("text", [RACY_TRIO, CHAINED_READS, DEPENDENT_COMPLETION])
def test_both_sleep_set_engines_walk_the_same_tree(text):
    a = explore(text, ExploreConfig(algorithm="pop", collect_sequences="full"))
    b = explore(text, ExploreConfig(algorithm="pop-explicit", collect_sequences="full"))
    assert a.sequences == b.sequences


def test_exploration_is_deterministic():
    first = pop(CHAINED_READS)
    second = pop(CHAINED_READS)
    assert first.fingerprints == second.fingerprints


def test_digest_sequences_match_full_sequences():
    import hashlib

    full = explore(RACY_TRIO, ExploreConfig(collect_sequences="full"))
    digest = explore(RACY_TRIO, ExploreConfig(collect_sequences="digest"))
    expect = [
        hashlib.blake2b("\x00".join(seq).encode(), digest_size=16).digest()
        for seq in full.sequences
    ]
    assert digest.sequences == expect


# ---- structural claims ---------------------------------------------------------------


@pytest.mark.parametrize("alg", ["pop", "pop-explicit"])
def test_no_exploration_ever_blocks_with_work_left(alg):
    for prog in (RACY_TRIO, CHAINED_READS, DEPENDENT_COMPLETION, gen_fig1()):
        rep = explore(prog, ExploreConfig(algorithm=alg))
        assert rep.blocked_with_enabled == 0


def test_reversal_depth_is_quadratically_bounded():
    for prog in (gen_fig1(), gen_exp_mem3(4), gen_random(7)):
        rep = pop(prog)
        n = rep.longest_execution
        assert rep.max_reversal_depth <= n * (n - 1) // 2


def test_trivial_programs_explore_once():
    assert pop("var x\n").executions == 1
    assert pop("var x\nthread a { store x 1; load r x; }").executions == 1
    all_reads = "var x\n" + "\n".join(
        f"thread t{i} {{ load r x; }}" for i in range(3)
    )
    assert pop(all_reads).executions == 1


# ---- violations, limits, configuration -------------------------------------------------


def test_assertion_violations_carry_witnesses():
    rep = pop(
        """
        var y
        thread a { load r y; assert r == 0; }
        thread b { store y 2; }
        """
    )
    assert rep.executions == 2
    (viol,) = rep.assertion_violations
    assert viol["message"] == "thread a: assertion failed: r == 0"
    assert any(entry.endswith("y=2") for entry in viol["witness"])


def test_execution_limit_raises_with_partial_report():
    with pytest.raises(LimitExceeded) as info:
        pop(RACY_TRIO, max_execs=3)
    assert info.value.reason == "executions"
    assert info.value.report.executions == 3
    assert info.value.report.limit_exceeded == "executions"


def test_time_limit_raises_with_partial_report():
    with pytest.raises(LimitExceeded) as info:
        pop(gen_exp_mem3(6), max_seconds=0.05)
    assert info.value.reason == "seconds"
    assert info.value.report.limit_exceeded == "seconds"


@pytest.mark.parametrize("level", [0, 1, 2])
def test_invariant_levels_accept_valid_programs(level):
    rep = explore(CHAINED_READS, ExploreConfig(invariants=level))
    assert rep.executions == 24


def test_algorithm_aliases_and_config_validation():
    assert explore(RACY_TRIO, ExploreConfig(algorithm="brute-force")).executions == 6
    assert explore(RACY_TRIO, ExploreConfig(algorithm="pop-explicit-sleep")).executions == 6
    with pytest.raises(ValueError):
        ExploreConfig(algorithm="nope")
    with pytest.raises(ValueError):
        ExploreConfig(invariants=3)
    with pytest.raises(ValueError):
        ExploreConfig(max_execs=0)
    with pytest.raises(ValueError):
        ExploreConfig(collect_sequences="sometimes")


def test_report_serialization_keys():
    doc = pop(RACY_TRIO).to_dict()
    assert list(doc) == [
        "algorithm",
        "executions",
        "distinct_traces",
        "assertion_violations",
        "blocked_reversals",
        "reversals",
        "max_reversal_depth",
        "max_sschar_size",
        "blocked_with_enabled",
        "longest_execution",
        "peak_frames",
        "peak_expressions",
        "peak_schedules",
        "wall_ms",
        "limit_exceeded",
    ]


def test_dot_output_describes_the_tree(tmp_path):
    path = os.fspath(tmp_path / "tree.dot")
    pop(RACY_TRIO, dot=path)
    text = open(path, encoding="utf-8").read()
    assert text.startswith("digraph")
    assert text.rstrip().endswith("}")
    assert "x=1" in text
