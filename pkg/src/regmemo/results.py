"""Match results, run statistics and the public projection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class SuccessAt:
    position: int


@dataclass(frozen=True)
class Failure:
    pass


@dataclass(frozen=True)
class Success:
    """Memo sentinel: a success recorded earlier, position unknown."""


@dataclass(frozen=True)
class FailureAt:
    depth: int


@dataclass(frozen=True)
class SuccessAtWithKeys:
    position: int
    keys: tuple = ()


MatchResult = Union[SuccessAt, Failure, Success, FailureAt, SuccessAtWithKeys]


def project_result(r: MatchResult) -> MatchResult:
    """Forget the depth of a failure and the key set of a success."""
    if isinstance(r, FailureAt):
        return Failure()
    if isinstance(r, SuccessAtWithKeys):
        return SuccessAt(r.position)
    return r


def is_success(r: MatchResult) -> bool:
    return isinstance(r, (SuccessAt, SuccessAtWithKeys, Success))


@dataclass
class RunStats:
    recursive_calls: int = 0
    memo_hits: int = 0
    memo_writes: int = 0
    memo_entries: int = 0
    peak_stack_depth: int = 0
    backend: str = "python"
    # filled only in shadow mode: (state, position, stored, recomputed)
    shadow_mismatches: list = field(default_factory=list)
    shadow_checks: int = 0

    def counters(self) -> tuple:
        return (self.recursive_calls, self.memo_hits, self.memo_writes,
                self.memo_entries, self.peak_stack_depth)


@dataclass
class MatchOutcome:
    result: MatchResult
    stats: RunStats

    @property
    def public(self) -> MatchResult:
        return project_result(self.result)
