"""Structured run reports and their JSON form."""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, ClassVar, Final

import numpy as np

from .errors import QsrError
from .fock_oracle import ErrorCurve
from .gkls import CpReport, Eigenpair
from .photon_kernel import DCoefficients
from .propagator import FittedRates, RelaxationRates
from .schema import SCHEMA_VERSION

RE_ZERO_TOLERANCE: Final = 1e-8


def complex_json(z: complex) -> dict[str, float]:
    return {"re": _real(z.real), "im": _real(z.imag)}


def _real(x: float) -> float:
    """Plain float for JSON; infinities are clamped to the largest finite float."""
    value = float(x)
    if math.isnan(value):
        raise ValueError("refusing to serialise NaN")
    if math.isinf(value):
        return math.copysign(np.finfo(float).max, value)
    return value


def coefficients_json(d: DCoefficients) -> dict[str, dict[str, float]]:
    return {str(m): complex_json(v) for m, v in d.as_dict().items()}


def _keyed(values: Mapping[float, float]) -> dict[str, float]:
    return {repr(float(g)): _real(v) for g, v in values.items()}


def _envelope(command: str, status: str, config: Mapping[str, Any]) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "status": status,
        "config": dict(config),
    }


@dataclass(slots=True)
class CoeffsReport:
    config: Mapping[str, Any]
    frequency: DCoefficients
    time_side: DCoefficients
    surface_rate: float
    radial_reduction_defect: float
    decay_bound: float
    decay_stability: float
    files: list[str] = field(default_factory=list)

    command: ClassVar[str] = "coeffs"

    @property
    def re_parts_zero(self) -> bool:
        d = self.frequency
        return abs(d.d0.real) < RE_ZERO_TOLERANCE and abs(d.dm1.real) < RE_ZERO_TOLERANCE

    @property
    def path_agreement(self) -> float:
        worst = 0.0
        for m in (1, 0, -1):
            a, b = self.frequency[m], self.time_side[m]
            scale = max(abs(a), abs(b), 1e-300)
            worst = max(worst, abs(a - b) / scale)
        return worst

    def to_dict(self) -> dict[str, Any]:
        residuals = self.time_side.diagnostics.get("residuals", {})
        return {
            **_envelope(self.command, "ok", self.config),
            "d_frequency": coefficients_json(self.frequency),
            "d_time": coefficients_json(self.time_side),
            "re_d1": _real(self.frequency.d1.real),
            "re_d0": _real(self.frequency.d0.real),
            "re_dm1": _real(self.frequency.dm1.real),
            "re_parts_zero": self.re_parts_zero,
            "path_agreement": _real(self.path_agreement),
            "extrapolation_residuals": {str(k): _real(v) for k, v in residuals.items()},
            "surface_rate": _real(self.surface_rate),
            "radial_reduction_defect": _real(self.radial_reduction_defect),
            "decay_bound": _real(self.decay_bound),
            "decay_stability": _real(self.decay_stability),
            "files": list(self.files),
        }


def _cp_json(report: CpReport) -> dict[str, Any]:
    return {
        "tau": report.tau,
        "min_choi_eigenvalue": _real(report.min_choi_eigenvalue),
        "trace_preservation_defect": _real(report.trace_preservation_defect),
        "unitality_defect": _real(report.unitality_defect),
        "hermiticity_defect": _real(report.hermiticity_defect),
        "passed": report.passed,
    }


@dataclass(slots=True)
class SpectrumReport:
    config: Mapping[str, Any]
    d: DCoefficients
    synthetic: bool
    eigenpairs: Sequence[Eigenpair]
    closed_form: Mapping[str, complex]
    residual: float
    spectral_gap: float
    cp: Sequence[CpReport]
    files: list[str] = field(default_factory=list)

    command: ClassVar[str] = "spectrum"

    def to_dict(self) -> dict[str, Any]:
        return {
            **_envelope(self.command, "ok", self.config),
            "d": coefficients_json(self.d),
            "synthetic": self.synthetic,
            "eigenpairs": [
                {
                    "label": p.label,
                    "value": complex_json(p.value),
                    "vector": [[complex_json(x) for x in row] for row in p.vector.tolist()],
                }
                for p in self.eigenpairs
            ],
            "closed_form": {k: complex_json(v) for k, v in self.closed_form.items()},
            "residual": _real(self.residual),
            "spectral_gap": _real(self.spectral_gap),
            "cp": [_cp_json(r) for r in self.cp],
            "files": list(self.files),
        }


@dataclass(slots=True)
class EvolveReport:
    config: Mapping[str, Any]
    g: float
    observable: str
    initial_state: Sequence[complex]
    rates: RelaxationRates | None
    fitted: FittedRates | None
    n_points: int
    files: list[str] = field(default_factory=list)

    command: ClassVar[str] = "evolve"

    def to_dict(self) -> dict[str, Any]:
        rates = None
        if self.rates is not None:
            rates = {
                "longitudinal_rate": _real(self.rates.longitudinal_rate),
                "transverse_rate": _real(self.rates.transverse_rate),
                "frequency_shift": _real(self.rates.frequency_shift),
                "t1": _real(self.rates.t1),
                "t2": _real(self.rates.t2),
            }
        fitted = None
        if self.fitted is not None:
            fitted = {
                "longitudinal_rate": _real(self.fitted.longitudinal_rate),
                "transverse_rate": _real(self.fitted.transverse_rate),
                "samples": self.fitted.samples,
            }
        return {
            **_envelope(self.command, "ok", self.config),
            "g": self.g,
            "observable": self.observable,
            "initial_state": [complex_json(z) for z in self.initial_state],
            "rates": rates,
            "fitted": fitted,
            "n_points": self.n_points,
            "files": list(self.files),
        }


@dataclass(slots=True)
class OracleReport:
    config: Mapping[str, Any]
    sigma: str
    curve: ErrorCurve
    window: float
    dimension: int
    files: list[str] = field(default_factory=list)

    command: ClassVar[str] = "oracle-compare"

    @property
    def status(self) -> str:
        return self.curve.status

    def to_dict(self) -> dict[str, Any]:
        curve = self.curve
        ratio = curve.ratio_consistency
        spread = curve.spread
        return {
            **_envelope(self.command, curve.status, self.config),
            "sigma": self.sigma,
            "g_list": curve.g_values,
            "sup_errors": _keyed({r.g: r.sup_error for r in curve.runs}),
            "scaled_errors": _keyed({r.g: r.sup_error / r.g**2 for r in curve.runs if r.g > 0}),
            "ratio_consistency": None if ratio is None else _real(ratio),
            "spread": None if spread is None else _real(spread),
            "secular_ratio": _keyed({r.g: r.secular_ratio for r in curve.runs}),
            "floor": _real(curve.floor),
            "baseline_error": _real(curve.baseline.sup_error),
            "window_error": _real(curve.window_error),
            "window": self.window,
            "dimension": self.dimension,
            "sred_defect": _keyed({r.g: r.sred_defect for r in curve.runs}),
            "norm_defect": _keyed({r.g: r.norm_defect for r in curve.runs}),
            "reason": curve.reason,
            "files": list(self.files),
        }


@dataclass(slots=True)
class SweepRow:
    value: float
    window_error: float
    sup_error: float | None = None
    status: str | None = None

    def to_dict(self) -> dict[str, Any]:
        row: dict[str, Any] = {"value": self.value, "window_error": _real(self.window_error)}
        if self.sup_error is not None:
            row["sup_error"] = _real(self.sup_error)
        if self.status is not None:
            row["status"] = self.status
        return row


@dataclass(slots=True)
class SweepReport:
    config: Mapping[str, Any]
    axis: str
    quantity: str
    rows: list[SweepRow]
    files: list[str] = field(default_factory=list)

    command: ClassVar[str] = "sweep"

    def to_dict(self) -> dict[str, Any]:
        return {
            **_envelope(self.command, "ok", self.config),
            "axis": self.axis,
            "quantity": self.quantity,
            "rows": [r.to_dict() for r in self.rows],
            "files": list(self.files),
        }


def error_record(exc: QsrError, command: str | None = None) -> dict[str, Any]:
    """Machine-readable record of a failed run."""
    record: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "status": "error",
        "kind": exc.kind,
        "message": exc.message or str(exc),
        "exit_code": exc.exit_code,
    }
    if command is not None:
        record["command"] = command
    return record
