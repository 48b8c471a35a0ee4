"""Error categories shared across the package.

Each category carries a short machine-readable ``category`` string and a
process exit code used by the command line front end.
"""

from __future__ import annotations


class VbcensusError(Exception):
    category = "error"
    exit_code = 1


class ConfigurationError(VbcensusError):
    category = "configuration"
    exit_code = 3


class RangeError(VbcensusError, ValueError):
    category = "range"
    exit_code = 4


class ParseError(VbcensusError, ValueError):
    category = "parse"
    exit_code = 5


class ContractViolation(VbcensusError, ValueError):
    category = "contract"
    exit_code = 6


class ExactnessError(VbcensusError, AssertionError):
    """A resolution failed its exactness or minimality check."""

    category = "exactness"
    exit_code = 7


class WindowTooSmallError(VbcensusError):
    category = "window"
    exit_code = 8


class FactsInconsistentError(VbcensusError):
    category = "facts"
    exit_code = 9


class AmbiguityError(VbcensusError):
    """A computation reached a state the model cannot resolve uniquely."""

    category = "ambiguity"
    exit_code = 10


class VerificationMismatch(VbcensusError):
    category = "mismatch"
    exit_code = 1
