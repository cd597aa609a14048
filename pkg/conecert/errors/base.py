from typing import Any, Dict, Optional


class ConecertError(Exception):
    """Base class of Conecert errors."""

    def __init__(self, message: str,
                 context: Optional[Dict[str, Any]] = None):
        """Initialize a ConecertError instance.

        Args:
            message: The error message.
            context: Optional machine readable details, eg. the offending
                cube or config key.

        """
        super().__init__(message)
        self.context: Dict[str, Any] = dict(context or {})
