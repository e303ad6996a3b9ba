"""Exception taxonomy shared across the package.

The CLI maps these onto distinct exit codes so that automation can tell
misuse (config), refusal (budget) and statistical failure apart.
"""

from __future__ import annotations


class CatMouseError(Exception):
    """Base class for all package errors."""


class ChainStructureError(CatMouseError):
    """A kernel violates a structural requirement (mass, loops, ergodicity)."""


class BudgetExceededError(CatMouseError):
    """An experiment refused to start because its declared cost is above the cap."""

    def __init__(self, message: str, declared: float, cap: float):
        super().__init__(message)
        self.declared = declared
        self.cap = cap


class ConfigError(CatMouseError):
    """Invalid experiment configuration (unknown key, bad value, failed precondition)."""


class SolverError(CatMouseError):
    """A linear solve or relaxation failed (singular or not converged)."""
