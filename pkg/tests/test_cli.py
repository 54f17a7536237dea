"""Command-line front end: subcommands, exit codes, output formats."""

from __future__ import annotations

import json

import pytest

from pop_smc.cli import EXIT_LIMIT, EXIT_OK, EXIT_PARSE, EXIT_USAGE, EXIT_VIOLATION, main

RACY_TRIO = """
var x
thread a { store x 1; }
thread b { store x 2; }
thread c { load r x; }
"""

FAILING_ASSERT = """
var y
thread a { load r y; assert r == 0; }
thread b { store y 2; }
"""


@pytest.fixture
def prog_file(tmp_path):
    def write(text: str) -> str:
        path = tmp_path / "prog.txt"
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


def run(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


# ---- check -----------------------------------------------------------------------


def test_check_reports_and_exits_zero(prog_file, capsys):
    code, out = run(capsys, "check", prog_file(RACY_TRIO))
    assert code == EXIT_OK
    assert "executions          6" in out


def test_check_json_is_schema_stable_and_deterministic(prog_file, capsys):
    path = prog_file(RACY_TRIO)
    code, out1 = run(capsys, "check", path, "--json")
    assert code == EXIT_OK
    doc = json.loads(out1)
    assert doc["algorithm"] == "pop"
    assert doc["executions"] == 6
    assert doc["distinct_traces"] == 6
    assert doc["blocked_with_enabled"] == 0
    assert doc["limit_exceeded"] is None
    _, out2 = run(capsys, "check", path, "--json")
    d1, d2 = json.loads(out1), json.loads(out2)
    d1.pop("wall_ms"), d2.pop("wall_ms")
    assert d1 == d2


def test_check_reports_assertion_violation(prog_file, capsys):
    code, out = run(capsys, "check", prog_file(FAILING_ASSERT))
    assert code == EXIT_VIOLATION
    assert "assertion failed" in out
    assert "thread b step 1: y=2" in out


def test_check_empty_program_counts_one_execution(prog_file, capsys):
    code, out = run(capsys, "check", prog_file("var x\n"))
    assert code == EXIT_OK
    assert "executions          1" in out


def test_check_algorithm_flag_selects_engine(prog_file, capsys):
    path = prog_file(RACY_TRIO)
    for alg, reported in (("pop-explicit", "pop-explicit"), ("brute", "brute")):
        code, out = run(capsys, "check", path, "--algorithm", alg, "--json")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["algorithm"] == reported
        assert doc["executions"] == 6


def test_check_limit_exit(prog_file, capsys):
    code, out = run(capsys, "check", prog_file(RACY_TRIO), "--max-execs", "2", "--json")
    assert code == EXIT_LIMIT
    doc = json.loads(out)
    assert doc["limit_exceeded"] == "executions"
    assert doc["executions"] == 2


def test_parse_error_exit(prog_file, capsys):
    code, _ = run(capsys, "check", prog_file("thread a { store x 1; }"))
    assert code == EXIT_PARSE


def test_usage_error_exit(capsys):
    assert main(["check"]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["check", "prog", "--algorithm", "nope"]) == EXIT_USAGE


def test_missing_file_is_a_usage_error(capsys):
    assert main(["check", "/nonexistent/prog.txt"]) == EXIT_USAGE


# ---- verify ----------------------------------------------------------------------


def test_verify_single_file(prog_file, capsys):
    code, out = run(capsys, "verify", prog_file(RACY_TRIO))
    assert code == EXIT_OK
    assert "verdict: ok" in out


def test_verify_single_file_json(prog_file, capsys):
    code, out = run(capsys, "verify", prog_file(RACY_TRIO), "--json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["ok"] is True
    assert doc["classes"] == 6


def test_verify_seeded_corpus(capsys):
    code, out = run(capsys, "verify", "--seeds", "5")
    assert code == EXIT_OK
    assert "5 seeds verified, 0 failed" in out


# ---- bench -----------------------------------------------------------------------


def test_bench_compares_to_expected_count(capsys):
    code, out = run(capsys, "bench", "exp-mem3", "3", "--json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["bench"] == "exp-mem3(3)"
    assert doc["expected"] == 12
    assert doc["executions"] == 12


def test_bench_without_stored_expectation_uses_the_oracle(capsys):
    code, out = run(capsys, "bench", "fig1")
    assert code == EXIT_OK
    assert "verdict: ok" in out


def test_bench_unknown_name_is_usage_error(capsys):
    assert main(["bench", "nope"]) == EXIT_USAGE


# ---- dump-tree -------------------------------------------------------------------


def test_dump_tree_writes_dot(prog_file, capsys, tmp_path):
    out_path = tmp_path / "tree.dot"
    code, _ = run(capsys, "dump-tree", prog_file(RACY_TRIO), "--dot", str(out_path))
    assert code == EXIT_OK
    assert out_path.read_text(encoding="utf-8").startswith("digraph")


def test_dump_tree_defaults_to_stdout(prog_file, capsys):
    code, out = run(capsys, "dump-tree", prog_file(RACY_TRIO))
    assert code == EXIT_OK
    assert out.startswith("digraph")
    assert "x=2" in out
