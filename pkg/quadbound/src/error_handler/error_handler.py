"""
Error handler implementation.

This module provides the exception hierarchy, logging setup and failure
tracking used throughout QuadBound.
"""

import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional


class QuadboundError(Exception):
    """Base exception for all QuadBound exceptions."""
    pass


class DomainError(QuadboundError, ValueError):
    """Exception raised when an argument lies outside the domain of an operation."""
    pass


class IntegrationError(QuadboundError):
    """
    Exception raised when the adaptive integrator does not reach its tolerance.

    The best estimate found so far is kept on the exception so callers can
    decide whether it is still usable.
    """

    def __init__(self, message: str, estimate: float, error_estimate: float,
                 panels: int = 0) -> None:
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate
        self.panels = panels


class UnsupportedError(QuadboundError):
    """Exception raised for weight kinds or methods an operation does not support."""
    pass


class UsageError(QuadboundError):
    """Exception raised for an invalid run configuration."""
    pass


class VerificationError(QuadboundError):
    """Exception raised when a verification criterion or adversary check fails."""
    pass


class BoundViolationError(QuadboundError):
    """Exception raised when a computed quantity falls below a proven bound."""
    pass


def setup_error_handling(config_manager: Any, log_level: Optional[str] = None) -> None:
    """
    Set up logging configuration based on the provided configuration.

    Args:
        config_manager: The configuration manager instance
        log_level: Optional level overriding the configured one
    """
    error_config = config_manager.get_section("error_handling")
    log_level_str = log_level or error_config.get("log_level", "INFO")
    log_file = error_config.get("log_file", None)

    level = getattr(logging, str(log_level_str).upper(), logging.INFO)

    # Reports are written to stdout, so log records go to stderr
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )

    logging.debug(f"Error handling configured with log level: {log_level_str}")


class ErrorHandler:
    """
    Centralized error logging and failure tracking.

    Commands report failed criteria, failed integrations, adversary
    violations and rejected configurations here; main() logs the summary
    once the run is over.
    """

    CATEGORIES = ("verification", "integration", "usage", "adversary")

    def __init__(self, config_manager: Any = None) -> None:
        self.config_manager = config_manager
        self.failures: Dict[str, List[Dict[str, Any]]] = {
            category: [] for category in self.CATEGORIES
        }
        self.logger = logging.getLogger(__name__)

    def _log(self, level: int, module: str, message: str,
             context: Optional[Dict[str, Any]] = None, **kwargs: Any) -> None:
        suffix = f" Context: {context}" if context else ""
        self.logger.log(level, f"{module} - {message}{suffix}", **kwargs)

    def log_error(self, module: str, message: str, exception: Optional[Exception] = None,
                  context: Optional[Dict[str, Any]] = None) -> None:
        """
        Log an error, with the traceback when called while handling one.

        Args:
            module: The module where the error occurred
            message: The error message
            exception: The exception that was raised, if any
            context: Additional context data for the error
        """
        if exception is None:
            self._log(logging.ERROR, module, message, context)
            return
        exc_info = sys.exc_info()
        self._log(logging.ERROR, module, f"{message}: {exception}", context,
                  exc_info=exc_info if exc_info[0] is not None else None)

    def log_warning(self, module: str, message: str,
                    context: Optional[Dict[str, Any]] = None) -> None:
        self._log(logging.WARNING, module, message, context)

    def log_info(self, module: str, message: str,
                 context: Optional[Dict[str, Any]] = None) -> None:
        self._log(logging.INFO, module, message, context)

    def track_failure(self, failure_type: str, subject: str, error: str,
                      context: Optional[Dict[str, Any]] = None) -> None:
        """
        Record a failure for the end-of-run summary.

        Args:
            failure_type: One of CATEGORIES, or a new category
            subject: What failed, e.g. a criterion name or "c=2, n=4"
            error: The error message
            context: Numbers behind the failure
        """
        self.failures.setdefault(failure_type, []).append({
            "subject": subject,
            "error": error,
            "context": context or {},
            "timestamp": time.time(),
        })
        self.logger.debug(f"Tracked failure: {failure_type} - {subject} - {error}")

    def get_failures(self, failure_type: Optional[str] = None) -> Dict[str, List[Dict[str, Any]]]:
        if failure_type:
            return {failure_type: self.failures.get(failure_type, [])}
        return self.failures

    def failure_count(self) -> int:
        return sum(len(items) for items in self.failures.values())

    def summary(self) -> Dict[str, Any]:
        """Failure counts per non-empty category and the subjects that failed."""
        return {
            category: {"count": len(items), "subjects": [item["subject"] for item in items]}
            for category, items in self.failures.items() if items
        }

    def clear_failures(self, failure_type: Optional[str] = None) -> None:
        if failure_type:
            self.failures[failure_type] = []
        else:
            for key in self.failures:
                self.failures[key] = []
