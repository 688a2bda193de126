"""Sup-norm error between the full reduced dynamics and the Markov approximation."""

from __future__ import annotations

import logging
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Final, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .. import spin_algebra as sa
from ..events import Event, JobAdvanced, JobFinished, JobStarted
from ..gkls import GklsGenerator
from ..propagator import MarkovPropagator
from .bath import Discretization
from .hamiltonian import build_hamiltonian
from .reduced import PropagationSettings, propagate_vacuum_pair, sred_consistency
from .space import TruncatedSpace

logger = logging.getLogger(__name__)

CurveStatus = Literal["ok", "inconclusive"]

#: A run is conclusive only when the floor is this far below the smallest error.
FLOOR_MARGIN: Final = 10.0
RATIO_BAND: Final = (0.5, 2.0)


@dataclass(frozen=True, slots=True)
class OracleSettings:
    excitation_cap: int = 2
    dim_budget: int = 500_000
    propagation: PropagationSettings = field(default_factory=PropagationSettings)

    def __post_init__(self) -> None:
        if self.excitation_cap < 0:
            raise ValueError("excitation_cap must be nonnegative")
        if self.dim_budget < 2:
            raise ValueError("dim_budget must be at least 2")


@dataclass(slots=True)
class CouplingRun:
    """Everything measured for one value of ``g``."""

    g: float
    trace: NDArray[np.float64]
    reduced: NDArray[np.complex128]
    sred_defect: float
    norm_defect: float
    seconds: float

    @property
    def sup_error(self) -> float:
        return float(np.max(self.trace)) if self.trace.size else 0.0

    @property
    def secular_ratio(self) -> float:
        """Max error over the second half of the window relative to the first half."""
        half = self.trace.size // 2
        if half == 0:
            return 1.0
        first = float(np.max(self.trace[:half]))
        second = float(np.max(self.trace[half:]))
        return second / first if first > 0 else (0.0 if second == 0 else float("inf"))


@dataclass(slots=True)
class ErrorCurve:
    """``E(g) = max_t ‖σ₀(S(t, σ)) - e^{tg²L}γ_tσ‖`` for a list of couplings."""

    times: NDArray[np.float64]
    runs: list[CouplingRun]
    baseline: CouplingRun
    window_error: float
    status: CurveStatus
    reason: str

    @property
    def g_values(self) -> list[float]:
        return [r.g for r in self.runs]

    @property
    def sup_errors(self) -> list[float]:
        return [r.sup_error for r in self.runs]

    @property
    def floor(self) -> float:
        """g-independent part of the error budget: ``E(0)`` plus the kernel error."""
        return self.baseline.sup_error + self.window_error

    @property
    def scaled_errors(self) -> list[float]:
        return [r.sup_error / (r.g * r.g) for r in self.runs if r.g > 0]

    @property
    def ratio_consistency(self) -> float | None:
        """``(E(g_min)/g_min²) / (E(g_max)/g_max²)`` over the positive couplings."""
        positive = sorted((r for r in self.runs if r.g > 0), key=lambda r: r.g)
        if len(positive) < 2 or positive[-1].sup_error == 0:
            return None
        lo, hi = positive[0], positive[-1]
        return (lo.sup_error / lo.g**2) / (hi.sup_error / hi.g**2)

    @property
    def spread(self) -> float | None:
        scaled = self.scaled_errors
        if len(scaled) < 2 or min(scaled) == 0:
            return None
        return max(scaled) / min(scaled)

    @property
    def ratio_ok(self) -> bool:
        ratio = self.ratio_consistency
        return ratio is not None and RATIO_BAND[0] <= ratio <= RATIO_BAND[1]


def comparison_window(g_min: float, re_d1: float, discretization: Discretization) -> float:
    """``3/(2 g_min² Re d₁)``, capped by the working window of the bath comb."""
    if g_min <= 0 or re_d1 <= 0:
        return discretization.window
    return min(3.0 / (2.0 * g_min * g_min * re_d1), discretization.window)


def error_trace(
    reduced: NDArray[np.complex128],
    propagator: MarkovPropagator,
    sigma: ArrayLike,
    times: NDArray[np.float64],
    g: float,
) -> NDArray[np.float64]:
    """Operator-norm distance at each time between the oracle and the approximation."""
    vec = sa.to_ladder_vector(sigma)
    coeffs = np.einsum("tkl,l->tk", propagator.superoperators(times, g), vec)
    approx = np.stack([sa.from_ladder_vector(c) for c in coeffs])
    return np.linalg.norm(reduced - approx, ord=2, axis=(1, 2))


def _no_interaction(discretization: Discretization, settings: OracleSettings) -> bool:
    modes = discretization.modes
    return settings.excitation_cap == 0 or not modes.active_channels or not np.any(modes.couplings)


def error_curve(
    sigma: ArrayLike,
    g_list: Sequence[float],
    times: ArrayLike,
    *,
    discretization: Discretization,
    generator: GklsGenerator,
    beta: float,
    settings: OracleSettings | None = None,
    max_workers: int = 1,
    emit: Callable[[Event], None] | None = None,
    job_prefix: str = "",
) -> ErrorCurve:
    """Measure ``E(g)`` for each coupling plus the ``g = 0`` floor.

    Jobs for different couplings are independent and run on a thread pool;
    results keep the order of ``g_list``. Progress events are labelled
    ``f"{job_prefix}g=..."`` so concurrent curves keep distinct jobs.

    Raises:
        ValueError: If ``g_list`` is empty or contains negative couplings.
        DimensionBudgetError: If the truncated space exceeds the budget.
        KrylovError: If propagation fails.
    """
    settings = settings or OracleSettings()
    if not g_list:
        raise ValueError("g_list must not be empty")
    if any(g < 0 for g in g_list):
        raise ValueError("couplings must be nonnegative")
    grid = np.atleast_1d(np.asarray(times, dtype=np.float64))
    observable = sa.as_observable(sigma)
    modes = discretization.modes
    space = TruncatedSpace(modes.pool_size, settings.excitation_cap, dim_budget=settings.dim_budget)
    logger.info(
        "oracle: dimension %d (%d modes, cap %d), %d times up to %g",
        space.dimension,
        modes.pool_size,
        settings.excitation_cap,
        grid.size,
        float(grid[-1]),
    )
    propagator = MarkovPropagator(generator, beta)

    def notify(event: Event) -> None:
        if emit is not None:
            emit(event)

    def run(g: float) -> CouplingRun:
        label = f"{job_prefix}g={g:g}"
        start = time.perf_counter()
        notify(JobStarted(job=label, total=int(grid.size)))
        h = build_hamiltonian(modes, beta, g, space)
        dynamics = propagate_vacuum_pair(
            h,
            grid,
            settings.propagation,
            progress=lambda k: notify(JobAdvanced(job=label, completed=k)),
        )
        reduced = dynamics.reduced(observable)
        trace = error_trace(reduced, propagator, observable, grid, g)
        sred = sred_consistency(h, observable, float(grid[-1]), dynamics=dynamics)
        seconds = time.perf_counter() - start
        result = CouplingRun(
            g=g,
            trace=trace,
            reduced=reduced,
            sred_defect=sred,
            norm_defect=dynamics.norm_defect(),
            seconds=seconds,
        )
        notify(JobFinished(job=label, seconds=seconds, summary=f"E={result.sup_error:.3e}"))
        return result

    couplings = [0.0, *g_list]
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run, couplings))
    else:
        results = [run(g) for g in couplings]
    baseline, runs = results[0], results[1:]
    status, reason = _classify(runs, baseline, discretization, settings)
    curve = ErrorCurve(
        times=grid,
        runs=runs,
        baseline=baseline,
        window_error=discretization.window_error,
        status=status,
        reason=reason,
    )
    logger.info("oracle comparison %s (%s), floor %.3e", status, reason or "resolved", curve.floor)
    return curve


def _classify(
    runs: Sequence[CouplingRun],
    baseline: CouplingRun,
    discretization: Discretization,
    settings: OracleSettings,
) -> tuple[CurveStatus, str]:
    if _no_interaction(discretization, settings):
        return "inconclusive", "no interaction channel open"
    positive = [r for r in runs if r.g > 0]
    if not positive:
        return "inconclusive", "no positive coupling"
    smallest = min(positive, key=lambda r: r.g)
    floor = baseline.sup_error + discretization.window_error
    if floor > smallest.sup_error / FLOOR_MARGIN:
        return "inconclusive", "discretization floor dominates"
    return "ok", ""
