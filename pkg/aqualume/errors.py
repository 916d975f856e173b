"""Exception hierarchy shared by every module."""

from __future__ import annotations

from typing import Any


class AqualumeError(Exception):
    """Base class for all errors raised by the package."""


class ContractViolation(AqualumeError, ValueError):
    """A shape or range precondition of an operation does not hold."""


class ImageReadError(AqualumeError, OSError):
    """An image file could not be read or decoded."""

    def __init__(self, path: str, reason: str = "") -> None:
        self.path = path
        message = f"cannot read image {path!r}"
        super().__init__(f"{message}: {reason}" if reason else message)


class FitNotConverged(AqualumeError, RuntimeError):
    """Parameter fitting ended above the residual threshold."""

    def __init__(self, best_residual: float, threshold: float) -> None:
        self.best_residual = best_residual
        self.threshold = threshold
        super().__init__(
            f"fit did not converge: best residual {best_residual:.3e} > {threshold:.1e}"
        )


class EncoderUnavailable(AqualumeError, RuntimeError):
    """The frozen perceptual feature encoder could not be constructed."""


class NonFiniteLoss(AqualumeError, FloatingPointError):
    """A training loss became NaN or infinite."""

    def __init__(self, message: str, diagnostics: dict[str, Any]) -> None:
        self.diagnostics = diagnostics
        super().__init__(f"{message}: {diagnostics}")


class ConfigError(AqualumeError, ValueError):
    """A configuration document failed validation."""

    def __init__(self, message: str, keys: list[str] | None = None) -> None:
        self.keys = keys or []
        super().__init__(message)


class CheckpointError(AqualumeError, RuntimeError):
    """A checkpoint archive is missing, unreadable or of an unknown version."""
