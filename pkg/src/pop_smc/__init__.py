"""Stateless model checking for a small shared-memory concurrent language.

The package explores one maximal execution per happens-before equivalence
class under sequential consistency.  ``explore`` drives the eager
race-reversal algorithm with either symbolic or explicit sleep sets;
``brute_force_classes`` enumerates classes outright as a ground-truth oracle;
``verify_optimality`` cross-checks all three.  ``bench`` holds the parametric
benchmark generators and the random-program corpus; ``cli`` the ``pop-smc``
command-line front end.
"""

from .bench import (
    BenchSpec,
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
from .explorer import (
    ExploreConfig,
    InvariantViolation,
    LimitExceeded,
    Report,
    brute_force_classes,
    explore,
    verify_optimality,
)
from .model import (
    GlobalState,
    InvalidExecution,
    ParseError,
    Program,
    ProgramError,
    apply_event,
    enabled_events,
    initial_state,
    parse_program,
    replay,
)
from .trace import Event, Execution, dependent, fingerprint, fingerprint_of

__all__ = [
    "BenchSpec",
    "Event",
    "Execution",
    "ExploreConfig",
    "GlobalState",
    "InvalidExecution",
    "InvariantViolation",
    "LimitExceeded",
    "ParseError",
    "Program",
    "ProgramError",
    "Report",
    "apply_event",
    "bench_names",
    "bench_spec",
    "brute_force_classes",
    "dependent",
    "desk_corpus",
    "enabled_events",
    "explore",
    "fingerprint",
    "fingerprint_of",
    "gen_exp_mem3",
    "gen_fig1",
    "gen_lastzero",
    "gen_length_param",
    "gen_random",
    "initial_state",
    "interleaving_bound",
    "parse_program",
    "replay",
    "verify_optimality",
]

__version__ = "0.1.0"
