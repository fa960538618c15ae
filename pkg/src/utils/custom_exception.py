"""Project exceptions that log details on instantiation.

`CustomException` records the original exception and logs a full traceback
through the project's logger. The numerical and simulation modules raise the
subclasses below so callers can tell a domain violation from a convergence
failure without parsing messages.
"""
from __future__ import annotations

import traceback
from typing import Any, Optional

from .custom_logger import get_logger

_logger = get_logger(__name__)


class CustomException(Exception):
    """A project-specific exception that logs the error and traceback.

    Parameters
    ----------
    message: str
        Human-readable message describing the error.
    original_exception: Optional[Any]
        The original caught exception (if any). This is attached to the
        instance and included in the log output.
    """

    def __init__(self, message: str, original_exception: Optional[Any] = None) -> None:
        self.message = message
        self.original_exception = original_exception

        tb = None
        try:
            tb = traceback.format_exc()
        except Exception:
            tb = None

        full_message = message
        if original_exception is not None:
            full_message = f"{full_message} | Original: {repr(original_exception)}"

        log_message = full_message
        if tb and tb != "None\n" and not tb.startswith("NoneType: None"):
            log_message = f"{log_message}\nTraceback:\n{tb}"

        _logger.error(f"{type(self).__name__}: {log_message}")

        super().__init__(full_message)


class DomainError(CustomException):
    """An argument lies outside the domain of the requested function."""


class PoleError(DomainError):
    """The argument hits a pole of the gamma function."""


class NonConvergence(CustomException):
    """A series, recurrence or quadrature failed to reach its tolerance."""


class BracketError(CustomException):
    """A target value is not attained on the supplied curve or interval."""


class DegenerateSample(CustomException):
    """A sample has zero residual variance, so the statistic is undefined."""


class InfeasibleContour(CustomException):
    """The pole-separation inequalities admit no contour offset."""


class ImaginaryResidue(CustomException):
    """A quantity that must be real came out with a significant imaginary part."""


class InsufficientTrials(CustomException):
    """Too few trials to resolve the requested tail probability."""


class ConfigError(CustomException):
    """Invalid experiment configuration; `field` names the offending entry."""

    def __init__(self, message: str, field: str = "", original_exception: Optional[Any] = None) -> None:
        self.field = field
        prefix = f"[{field}] " if field else ""
        super().__init__(f"{prefix}{message}", original_exception=original_exception)


class BranchWarning(RuntimeWarning):
    """The contour integrand grows along the contour or leaves the safe log range."""
