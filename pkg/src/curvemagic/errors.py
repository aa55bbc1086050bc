"""Error kinds raised across the package.

Each kind carries the process exit code the command-line front end uses.
"""

from __future__ import annotations


class CurveMagicError(Exception):
    """Base class; ``exit_code`` is what the CLI returns."""

    exit_code = 1

    @property
    def kind(self) -> str:
        return type(self).__name__


class InputError(CurveMagicError):
    """Malformed document or value."""

    exit_code = 2


class NotInteger(InputError):
    """Integral multiplicities were required."""


class BranchDataRequired(InputError):
    """The operation needs explicit branches, not only multiplicity data."""


class NotReduced(CurveMagicError):
    exit_code = 3


class NotDistinguished(CurveMagicError):
    exit_code = 3


class NotZeroSum(CurveMagicError):
    """A coordinate vector whose entries do not sum to zero."""

    exit_code = 3


class NotThroughOrigin(CurveMagicError):
    exit_code = 4


class NotTransverse(CurveMagicError):
    exit_code = 4


class UnsupportedExtension(CurveMagicError):
    """A root lies outside rational multiples of roots of unity."""

    exit_code = 5


class InsufficientPrecision(CurveMagicError):
    exit_code = 6


class NotUltrametric(CurveMagicError):
    """Three indices whose minimum contact is attained only once."""

    exit_code = 7

    def __init__(self, message: str, witness: tuple[int, int, int] | None = None):
        super().__init__(message)
        self.witness = witness
