from typing import Any, Optional

class CommandError(Exception):
    """Base for errors that end a command with a specific exit code."""

    exit_code = 1

    def __init__(self, detail: str, data: Optional[dict[str, Any]] = None, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        self.data = data or {}
        if exit_code is not None:
            self.exit_code = exit_code

class UsageError(CommandError):
    exit_code = 1

class VerificationFailed(CommandError):
    exit_code = 3
