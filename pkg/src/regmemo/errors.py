"""Exception types shared by the parser, compiler, engines and CLI."""

from __future__ import annotations


class RegexError(Exception):
    """Base class for every error raised by this package."""


class PatternSyntaxError(RegexError):
    """A pattern could not be parsed.

    ``offset`` is the 0-based byte offset into the UTF-8 encoded pattern.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


class UnsupportedFeature(PatternSyntaxError):
    """The pattern uses syntax outside the supported language (back-references etc)."""


class LimitExceeded(PatternSyntaxError):
    """Counted repetition would expand beyond the node budget."""


class UnsupportedAutomaton(RegexError):
    """An engine was handed an automaton outside the class it supports."""


class BudgetExceeded(RegexError):
    """The call budget of a run was exhausted."""

    def __init__(self, budget: int):
        super().__init__(f"call budget of {budget} exceeded")
        self.budget = budget


class InvariantViolation(RegexError):
    """An internal engine invariant failed (memo overwrite, depth bound, ...)."""
