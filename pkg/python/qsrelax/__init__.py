"""Markov (GKLS) approximation of a spin-1/2 in the quantized electromagnetic field.

The package computes the golden-rule coefficients of the photon bath,
builds the generator ``L`` of the approximate dynamics ``e^{tg²L}γ_t`` and
checks it against a truncated Fock-space model of the full spin-field system.
"""

from __future__ import annotations

from . import fock_oracle, gkls, photon_kernel, propagator, spin_algebra
from .cli import main
from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    DefectiveGeneratorError,
    DimensionBudgetError,
    DiscretizationError,
    ExtrapolationError,
    HermiticityError,
    KrylovError,
    NumericalError,
    PrincipalValueError,
    QsrError,
    QuadratureError,
    RecurrenceGuardError,
    TailMassError,
)
from .gkls import GklsGenerator, build_generator
from .photon_kernel import BathKernel, CutoffSpec, DCoefficients, d_coefficients
from .propagator import MarkovPropagator, approx_heisenberg, bloch_trajectory
from .spin_algebra import ExternalField

__all__ = [
    "BathKernel",
    "ConfigError",
    "CutoffSpec",
    "DCoefficients",
    "DefectiveGeneratorError",
    "DimensionBudgetError",
    "DiscretizationError",
    "ExternalField",
    "ExtrapolationError",
    "GklsGenerator",
    "HermiticityError",
    "KrylovError",
    "MarkovPropagator",
    "NumericalError",
    "PrincipalValueError",
    "QsrError",
    "QuadratureError",
    "RecurrenceGuardError",
    "RunConfig",
    "TailMassError",
    "approx_heisenberg",
    "bloch_trajectory",
    "build_generator",
    "d_coefficients",
    "fock_oracle",
    "gkls",
    "load_config",
    "main",
    "photon_kernel",
    "propagator",
    "spin_algebra",
]
