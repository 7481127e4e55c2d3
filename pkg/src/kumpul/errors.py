"""Shared exception types; the API layer maps them onto HTTP statuses."""

from __future__ import annotations

from typing import Optional


class KumpulError(Exception):
    """Base class for platform errors."""


class ValidationError(KumpulError):
    """Invalid input; carries machine-readable per-field messages."""

    def __init__(self, message: str, fields: Optional[dict[str, str]] = None):
        super().__init__(message)
        self.fields = fields or {}


class NotFoundError(KumpulError):
    """Referenced entity does not exist."""


class ConflictError(KumpulError):
    """Illegal state transition or duplicate id."""


class JobError(KumpulError):
    """Executor-level failure; ``retryable`` drives the coordinator's retry."""

    def __init__(self, message: str, retryable: bool = True):
        super().__init__(message)
        self.retryable = retryable
