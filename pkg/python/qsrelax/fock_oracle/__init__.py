"""Truncated-Fock reference model used to check the Markov approximation."""

from __future__ import annotations

from .bath import (
    CHANNELS,
    QUADRATURE_RULES,
    Discretization,
    ModeSet,
    QuadratureRule,
    discretize_bath,
    window_error,
)
from .error_curve import (
    CouplingRun,
    ErrorCurve,
    OracleSettings,
    comparison_window,
    error_curve,
    error_trace,
)
from .hamiltonian import FullHamiltonian, build_hamiltonian, field_operators
from .krylov import DensePropagator, KrylovSettings, propagate
from .reduced import (
    PROPAGATOR_CHOICES,
    PropagationSettings,
    PropagatorChoice,
    ReducedDynamics,
    evolve_state,
    propagate_vacuum_pair,
    reduced_observable,
    sred_consistency,
    sred_observable,
)
from .space import TruncatedSpace

__all__ = [
    "CHANNELS",
    "PROPAGATOR_CHOICES",
    "QUADRATURE_RULES",
    "CouplingRun",
    "DensePropagator",
    "Discretization",
    "ErrorCurve",
    "FullHamiltonian",
    "KrylovSettings",
    "ModeSet",
    "OracleSettings",
    "PropagationSettings",
    "PropagatorChoice",
    "QuadratureRule",
    "ReducedDynamics",
    "TruncatedSpace",
    "build_hamiltonian",
    "comparison_window",
    "discretize_bath",
    "error_curve",
    "error_trace",
    "evolve_state",
    "field_operators",
    "propagate",
    "propagate_vacuum_pair",
    "reduced_observable",
    "sred_consistency",
    "sred_observable",
    "window_error",
]
