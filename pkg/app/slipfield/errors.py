"""Exception types raised by slipfield.

The CLI maps these onto exit codes; library callers can catch them directly.
"""
from typing import Any


class ConfigError(ValueError):
    """Invalid or unreadable configuration. ``key`` names the offending entry."""

    def __init__(self, key: str | None, message: str):
        self.key = key
        prefix = f"{key}: " if key else ""
        super().__init__(f"{prefix}{message}")


class LoadRangeError(ValueError):
    pass


class GridError(ValueError):
    pass


class FrameError(ValueError):
    pass


class SolverError(RuntimeError):
    def __init__(self, message: str, *, residual: float):
        self.residual = residual
        super().__init__(f"{message} (relative residual {residual:.3e})")


class IntegrationError(RuntimeError):
    """Time integration gave up. ``state`` holds the last accepted SimState."""

    def __init__(self, message: str, *, state: Any = None):
        self.state = state
        super().__init__(message)
