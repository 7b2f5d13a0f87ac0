"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_DOMAIN = 2
EXIT_ABORT = 3


class HeckeMomentsError(Exception):
    """Base class for every error raised by this package."""

    exit_code: int = EXIT_ABORT


class DomainError(HeckeMomentsError, ValueError):
    """An argument lies outside the domain where the operation is defined."""

    exit_code = EXIT_DOMAIN


class OverflowRejected(HeckeMomentsError, OverflowError):
    """An exact integer value would leave the int64 norm range."""

    exit_code = EXIT_ABORT


class ToleranceError(HeckeMomentsError):
    """A truncation or quadrature error could not be pushed below tolerance."""

    exit_code = EXIT_ABORT


class VerificationFailure(HeckeMomentsError):
    """At least one row of a verification suite failed."""

    exit_code = EXIT_VERIFICATION_FAILED

    def __init__(self, suite: str, failed: int, total: int) -> None:
        super().__init__(f"{failed} of {total} rows failed in suite '{suite}'")
        self.suite = suite
        self.failed = failed
        self.total = total
