"""Shared error types."""
from __future__ import annotations


class StepFailure(RuntimeError):
    """A scheme or particle step produced an unphysical state."""

    def __init__(self, message: str, cell: int = -1, step: int = -1):
        super().__init__(message)
        self.cell = cell
        self.step = step


class SolverError(RuntimeError):
    """An iterative solver failed in a way that has no usable fallback."""


class CflError(RuntimeError):
    """A wave crossed more than one cell in a single step."""
