"""Backtracking regex matching with look-around and atomic groups, made
linear-time by memoization.

Typical use::

    from regmemo import compile_pattern, match
    nfa = compile_pattern(r"a*(?>a*)ab")
    outcome = match(nfa, b"aaab", engine="memo-la-at")
    outcome.public, outcome.stats.recursive_calls
"""

from .automaton import (
    Nfa,
    check_eps_loops,
    compile_ast,
    compile_pattern,
    dump_dot,
    dump_text,
    in_degree,
    nesting_depth,
)
from .errors import (
    BudgetExceeded,
    InvariantViolation,
    LimitExceeded,
    PatternSyntaxError,
    RegexError,
    UnsupportedAutomaton,
    UnsupportedFeature,
)
from .matcher import (
    DEFAULT_BACKEND,
    ENGINES,
    call_bound,
    match,
    match_backtrack,
    memo_match,
    memo_match_at,
    memo_match_enter_at,
    memo_match_enter_la,
    memo_match_exit_la,
    memo_match_la,
    memo_match_la_at,
)
from .results import (
    Failure,
    FailureAt,
    MatchOutcome,
    RunStats,
    Success,
    SuccessAt,
    SuccessAtWithKeys,
    project_result,
)
from .syntax import ast_size, parse, to_pattern

__version__ = "0.1.0"
