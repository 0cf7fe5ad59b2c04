"""Exception types raised by the library.

Every error carries enough context for the CLI to print a one-line
diagnostic naming the error and the offending input.
"""

from __future__ import annotations


class GermvalError(Exception):
    """Base class for all library errors."""


class SingularMatrix(GermvalError):
    """Elimination hit a zero pivot column; the matrix is singular.

    Call sites only solve negative definite systems, so this signals a
    caller bug rather than bad user input.
    """


class InvalidStep(GermvalError):
    """A blowup step violates the incidence rules.

    Attributes:
        index: 0-based position of the bad step in the step list.
        reason: human-readable explanation.
    """

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"step {index}: {reason}")


class NotAntinef(GermvalError):
    """A divisor expected to be antinef has positive intersection with
    some exceptional curve."""


class NotFound(GermvalError):
    """The finite-generation degree search exhausted its candidates.

    Unreachable for valid clusters; kept as an internal consistency guard.
    """


class NotAnLctComputer(GermvalError):
    """Asked for an lct witness ideal of a divisor whose asymptotic log
    canonical threshold falls strictly below k+1."""


class MldMinusInfinity(GermvalError):
    """The pair is not log canonical at the germ point, so no divisor
    computes its minimal log discrepancy."""
