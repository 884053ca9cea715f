"""
Error handler module.

This module provides the exception hierarchy, logging setup and failure tracking.
"""

from quadbound.src.error_handler.error_handler import (
    ErrorHandler,
    setup_error_handling,
    QuadboundError,
    DomainError,
    IntegrationError,
    UnsupportedError,
    UsageError,
    VerificationError,
    BoundViolationError,
)

__all__ = [
    "ErrorHandler",
    "setup_error_handling",
    "QuadboundError",
    "DomainError",
    "IntegrationError",
    "UnsupportedError",
    "UsageError",
    "VerificationError",
    "BoundViolationError",
]
