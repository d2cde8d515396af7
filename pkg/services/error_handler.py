import logging
import sys
import traceback
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class AppError(Exception):
    """Base exception class for our application"""
    def __init__(self, message: str, user_message: str = None, exit_code: int = 1):
        self.message = message
        self.user_message = user_message or "An unexpected error occurred."
        self.exit_code = exit_code
        super().__init__(self.message)


class ValidationError(AppError):
    """Raised when a model or an input fails validation"""
    def __init__(self, message: str, user_message: str = None):
        super().__init__(message, user_message or f"Invalid input: {message}", 1)


class ParseError(ValidationError):
    """Raised when an expression cannot be parsed"""
    def __init__(self, message: str, position: int = 0, user_message: str = None):
        self.position = position
        super().__init__(
            message,
            user_message or f"Syntax error at position {position}: {message}",
        )


class InputFileError(ValidationError):
    """Raised when an input file is missing, unreadable or unsafe"""


class SingularEvaluationError(AppError):
    """Raised when a linear form underflows or a logarithm sees a non-positive argument"""
    def __init__(self, message: str, user_message: str = None):
        super().__init__(message, user_message or "Evaluation hit the boundary of the simplex.", 1)


class DegenerateUnionError(AppError):
    """Raised when a union of fragments carries a zero count"""
    def __init__(self, message: str, user_message: str = None):
        super().__init__(message, user_message or "The union of these fragments has zero count.", 1)


class SizeCapError(AppError):
    """Raised when an exhaustive search exceeds its hard cap"""
    def __init__(self, message: str, user_message: str = None):
        super().__init__(message, user_message or "Input too large for exhaustive search.", 1)


class SingularHessianError(AppError):
    """Raised when a Newton step cannot be solved"""
    def __init__(self, message: str, user_message: str = None):
        super().__init__(message, user_message or "Hessian is singular; Newton iterations halted.", 2)


class DivergenceError(AppError):
    """Raised when an iteration goes astray; carries the best point seen so far"""
    def __init__(self, message: str, best_x=None, partial=None, user_message: str = None):
        self.best_x = best_x
        self.partial = partial
        super().__init__(message, user_message or "The iteration diverged.", 2)


def log_error(
    error: Exception,
    command: str = None,
    additional_context: Dict[str, Any] = None
):
    """Comprehensive error logging with context"""
    context = {
        "command": command,
        "error_type": type(error).__name__,
        "error_message": str(error),
        "traceback": traceback.format_exc(),
    }

    if additional_context:
        context.update(additional_context)

    # the user message is printed separately; keep the context out of default output
    if isinstance(error, AppError):
        logger.info(f"Application error: {context}")
    else:
        logger.error(f"Unexpected error: {context}")


def handle_cli_exception(exc: Exception, command: Optional[str] = None) -> int:
    """Log an exception raised by a command and turn it into an exit code"""
    log_error(exc, command)

    if isinstance(exc, AppError):
        print(f"error: {exc.user_message}", file=sys.stderr)
        return exc.exit_code

    # Don't expose internal error details to users
    print("error: an unexpected error occurred; rerun with -v for details", file=sys.stderr)
    return 1
