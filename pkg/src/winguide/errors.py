"""Exception hierarchy for the coupled-strip solver.

Every failure mode that callers are expected to handle gets its own class so the
CLI can map them to exit codes without string matching.
"""

from __future__ import annotations


class WaveguideError(Exception):
    """Base class for all package errors."""


class ValidationError(WaveguideError):
    """Bad user input: geometry, settings, malformed config, contract violations."""


class ThresholdError(ValidationError):
    """Spectral parameter outside the admissible window (lambda_floor, 1 - margin)."""


class UnsupportedArgumentError(ValidationError):
    """Argument outside the validated range of a special-function backend."""


class AccuracyError(WaveguideError):
    """A computation cannot meet its accuracy target with the given settings."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class RescanRequiredError(WaveguideError):
    """Scan grid too coarse: a branch may cross zero twice within one cell."""


class NotPositiveDefiniteError(WaveguideError):
    """Cholesky-based solve attempted on an indefinite matrix."""


class ResolventPoleError(WaveguideError):
    """Forced problem posed at (or numerically at) an eigenvalue."""


class EvaluationDomainError(ValidationError):
    """Field evaluation requested outside the open strips or inside the excluded sliver."""


class DegenerateInputError(ValidationError):
    """Prediction requested in a regime where the formula degenerates."""


class InsufficientDataError(ValidationError):
    """Not enough usable samples for a fit."""


class NumericalFailureError(WaveguideError):
    """An iteration failed to converge or a factorization broke down unrecoverably."""
