from .error_handler import (
    BudgetExceededError,
    ConfigError,
    DecouplingLabError,
    InvariantError,
    SpaceMismatchError,
    ValidationError,
    handle_error,
)
