"""Exception hierarchy for qsrelax.

Every error carries a stable ``kind`` string and the process exit code the CLI
reports for it. Configuration problems exit with 2, numerical failures with 1.
"""

from __future__ import annotations

from typing import ClassVar


class QsrError(Exception):
    """Base class for all qsrelax failures."""

    exit_code: ClassVar[int] = 1
    default_kind: ClassVar[str] = "error"

    def __init__(self, message: str = "", *, kind: str | None = None) -> None:
        """Initialize the error.

        Args:
            message: Human readable description.
            kind: Machine readable category; defaults to the class-level kind.
        """
        super().__init__(message)
        self.message = message
        self.kind = kind or self.default_kind


class ConfigError(QsrError):
    """Invalid or inconsistent run configuration."""

    exit_code = 2
    default_kind = "invalid config"


class NumericalError(QsrError):
    """A numerical routine could not reach its declared tolerance."""

    default_kind = "numerical failure"


class QuadratureError(NumericalError):
    default_kind = "quadrature failure"


class PrincipalValueError(QuadratureError):
    default_kind = "principal value failure"


class ExtrapolationError(NumericalError):
    """Richardson extrapolation residual above tolerance."""

    default_kind = "extrapolation residual"

    def __init__(self, message: str = "", *, residual: float) -> None:
        super().__init__(message)
        self.residual = residual


class KrylovError(NumericalError):
    """Krylov propagation failed to converge."""

    default_kind = "krylov non-convergence"

    def __init__(self, message: str = "", *, residual: float) -> None:
        super().__init__(message)
        self.residual = residual


class DimensionBudgetError(NumericalError):
    default_kind = "dimension overflow"


class DiscretizationError(NumericalError):
    default_kind = "discretization failure"


class TailMassError(DiscretizationError):
    default_kind = "tail mass"


class RecurrenceGuardError(DiscretizationError):
    default_kind = "recurrence guard"


class HermiticityError(NumericalError):
    default_kind = "hermiticity violated"


class DefectiveGeneratorError(NumericalError):
    """The generator has no basis of eigenvectors."""

    default_kind = "defective generator"


__all__ = [
    "ConfigError",
    "DefectiveGeneratorError",
    "DimensionBudgetError",
    "DiscretizationError",
    "ExtrapolationError",
    "HermiticityError",
    "KrylovError",
    "NumericalError",
    "PrincipalValueError",
    "QsrError",
    "QuadratureError",
    "RecurrenceGuardError",
    "TailMassError",
]
