"""
Error handling utilities for the decoupling toolkit.
"""

import logging
import sys
from typing import Optional

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2


class DecouplingLabError(Exception):
    """Base exception for toolkit errors."""
    pass


class SpaceMismatchError(DecouplingLabError):
    """Exception for mismatched tensor spaces and unknown or colliding labels."""
    pass


class ValidationError(DecouplingLabError):
    """Exception for inputs that violate an operation's preconditions."""
    pass


class BudgetExceededError(ValidationError):
    """Exception raised when an operation would exceed the dimension budget."""

    def __init__(self, what: str, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"{what} needs {required} matrix entries, budget is {budget} "
            f"(set DECOUPLING_LAB_BUDGET to raise it)"
        )


class ConfigError(DecouplingLabError):
    """Exception for malformed experiment configs."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        prefix = f"{field}: " if field else ""
        super().__init__(f"{prefix}{message}")


class InvariantError(DecouplingLabError):
    """Exception raised when a checked identity or inequality fails."""
    pass


def exit_code_for(error: Exception) -> int:
    """Map an exception to the CLI exit code contract."""
    if isinstance(error, ConfigError):
        return EXIT_CONFIG
    return EXIT_INVARIANT


def handle_error(error: Exception, context: str, exit_on_error: bool = False) -> None:
    """Handle an error with proper logging and optional exit.

    Args:
        error: The exception to handle
        context: Description of where the error occurred
        exit_on_error: Whether to exit the program after handling the error
    """
    error_type = type(error).__name__
    error_msg = str(error)

    logger.error(f"Error in {context}: {error_type}: {error_msg}")

    if exit_on_error:
        sys.exit(exit_code_for(error))
