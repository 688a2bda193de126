"""Run orchestration behind the command line subcommands."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Final, Literal, TypeVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import spin_algebra as sa
from .config import RunConfig
from .errors import ConfigError
from .events import Event, JobFinished, JobStarted, RunFinished, RunStarted
from .fock_oracle import (
    Discretization,
    ErrorCurve,
    TruncatedSpace,
    comparison_window,
    discretize_bath,
    error_curve,
)
from .gkls import (
    build_generator,
    closed_form_eigenvalues,
    eigen_residual,
    eigensystem,
    semigroup,
    spectral_gap,
    verify_cp,
)
from .output import OutputDirectory, Series
from .photon_kernel import (
    BathKernel,
    DCoefficients,
    d_coefficients,
    decay_profile,
    decay_stability,
    radial_reduction_check,
    surface_rate,
    time_side_coefficients,
    u_on_grid,
)
from .propagator import (
    FittedRates,
    MarkovPropagator,
    Trajectory,
    fit_relaxation,
    relaxation_rates,
)
from .reporting import (
    CoeffsReport,
    EvolveReport,
    OracleReport,
    SpectrumReport,
    SweepReport,
    SweepRow,
)

logger = logging.getLogger(__name__)

ObservableKind = Literal["bloch", "ladder"]
SweepAxis = Literal["n_modes", "excitation_cap", "omega_max"]
SWEEP_AXES: Final[tuple[SweepAxis, ...]] = ("n_modes", "excitation_cap", "omega_max")
CP_TAUS: Final = (0.1, 1.0, 10.0)
#: Grid of the kernel decay diagnostic.
DECAY_GRID: Final = np.linspace(0.0, 100.0, 1001)

Emit = Callable[[Event], None]
_T = TypeVar("_T")
_R = TypeVar("_R")


def _noop(_event: Event) -> None:
    return None


def _map_jobs(func: Callable[[_T], _R], items: Sequence[_T], threads: int) -> list[_R]:
    """Run independent jobs, keeping submission order in the result."""
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def run_coeffs(config: RunConfig, out: OutputDirectory) -> CoeffsReport:
    """Both computation paths of ``d_m`` plus kernel diagnostics."""
    kernel = config.kernel()
    frequency = d_coefficients(kernel)
    time_side = time_side_coefficients(kernel)
    profile = decay_profile(kernel, DECAY_GRID)
    report = CoeffsReport(
        config=config.to_dict(),
        frequency=frequency,
        time_side=time_side,
        surface_rate=surface_rate(kernel),
        radial_reduction_defect=radial_reduction_check(kernel).relative_defect,
        decay_bound=profile.bound,
        decay_stability=decay_stability(kernel, DECAY_GRID),
    )
    grid = config.time_grid()
    u = u_on_grid(kernel, grid)
    weighted = np.abs(u) * (1.0 + grid**3)
    out.csv(
        "kernel.csv",
        ["t", "re_u", "im_u", "abs_u_weighted"],
        [
            (float(t), float(z.real), float(z.imag), float(w))
            for t, z, w in zip(grid, u, weighted, strict=True)
        ],
    )
    out.svg(
        "kernel.svg",
        [Series("Re u", grid, u.real), Series("Im u", grid, u.imag)],
        xlabel="t",
        ylabel="u(t)",
    )
    report.files = list(out.written)
    out.json("coeffs.json", report.to_dict())
    logger.info("Re d1 = %.9g (time side %.9g)", frequency.d1.real, time_side.d1.real)
    return report


def coefficients_for(
    config: RunConfig, synthetic: Sequence[complex] | None = None
) -> DCoefficients:
    if synthetic is not None:
        return DCoefficients.from_values(synthetic)
    return d_coefficients(config.kernel())


def run_spectrum(
    config: RunConfig,
    out: OutputDirectory,
    synthetic_d: Sequence[complex] | None = None,
) -> SpectrumReport:
    """Eigensystem of ``L``, its closed-form comparison and CP certificates."""
    d = coefficients_for(config, synthetic_d)
    generator = build_generator(d, allow_negative_rates=synthetic_d is not None)
    pairs = eigensystem(generator)
    closed = closed_form_eigenvalues(d)
    residual = eigen_residual(generator)
    if residual > config.tolerances.eigen:
        logger.warning("eigenvalue residual %.3e above tolerance", residual)
    certificates = [
        verify_cp(semigroup(generator, tau), tolerance=config.tolerances.cp) for tau in CP_TAUS
    ]
    out.csv(
        "spectrum.csv",
        ["label", "re", "im", "closed_re", "closed_im"],
        [
            (p.label, p.value.real, p.value.imag, closed[p.label].real, closed[p.label].imag)
            for p in pairs
        ],
    )
    report = SpectrumReport(
        config=config.to_dict(),
        d=d,
        synthetic=synthetic_d is not None,
        eigenpairs=pairs,
        closed_form=closed,
        residual=residual,
        spectral_gap=spectral_gap(pairs),
        cp=certificates,
        files=list(out.written),
    )
    out.json("spectrum.json", report.to_dict())
    return report


def _fit(propagator: MarkovPropagator, grid: NDArray[np.float64], g: float) -> FittedRates | None:
    if g <= 0 or grid.size < 3:
        return None
    longitudinal = propagator.bloch_trajectory(sa.named_state("up"), grid, g)
    transverse = propagator.bloch_trajectory(sa.named_state("plus"), grid, g)
    try:
        return fit_relaxation(longitudinal, transverse)
    except ValueError as exc:
        logger.info("relaxation fit skipped: %s", exc)
        return None


def run_evolve(
    config: RunConfig,
    out: OutputDirectory,
    state: ArrayLike,
    observable: ObservableKind = "bloch",
) -> EvolveReport:
    """Approximate dynamics ``e^{tg²L}γ_t`` as a Bloch or ladder-coefficient table."""
    psi = sa.normalized_spinor(state, atol=1e-9)
    d = d_coefficients(config.kernel())
    propagator = MarkovPropagator(build_generator(d), config.beta)
    grid = config.time_grid()
    if observable == "bloch":
        trajectory = propagator.bloch_trajectory(psi, grid, config.g)
    else:
        trajectory = propagator.ladder_trajectory(config.observable(), grid, config.g)
    _write_trajectory(out, trajectory)
    report = EvolveReport(
        config=config.to_dict(),
        g=config.g,
        observable=observable,
        initial_state=[complex(z) for z in psi],
        rates=relaxation_rates(config.g, d) if config.g > 0 else None,
        fitted=_fit(propagator, grid, config.g) if observable == "bloch" else None,
        n_points=int(grid.size),
        files=list(out.written),
    )
    out.json("evolve.json", report.to_dict())
    return report


def _write_trajectory(out: OutputDirectory, trajectory: Trajectory) -> None:
    rows = trajectory.rows()
    header = ["t", *trajectory.columns]
    out.csv(
        f"{trajectory.kind}.csv",
        header,
        [
            (float(t), *(float(v) for v in row))
            for t, row in zip(trajectory.times, rows, strict=True)
        ],
    )
    out.svg(
        f"{trajectory.kind}.svg",
        [Series(name, trajectory.times, rows[:, k]) for k, name in enumerate(trajectory.columns)],
        xlabel="t",
        ylabel="value",
    )


def _discretize(
    config: RunConfig, kernel: BathKernel, *, window: float | None = None
) -> Discretization:
    return discretize_bath(
        kernel,
        config.omega_max,
        config.bath.n_modes,
        config.bath.rule,  # pyright: ignore[reportArgumentType]
        window=window,
        recurrence_fraction=config.oracle.recurrence_fraction,
        tail_tol=config.tolerances.tail,
    )


def oracle_times(
    config: RunConfig,
    d: DCoefficients,
    discretization: Discretization,
    g_min: float | None = None,
) -> NDArray[np.float64]:
    """Comparison grid on ``[0, 3/(2 g_min² Re d₁)]``, capped by the bath window."""
    if g_min is None:
        positive = [g for g in config.g_list if g > 0]
        g_min = min(positive) if positive else 0.0
    window = comparison_window(g_min, d.d1.real, discretization)
    return np.linspace(0.0, window, config.oracle.n_points)


def _compare(
    config: RunConfig,
    discretization: Discretization,
    d: DCoefficients,
    times: NDArray[np.float64],
    g_list: Sequence[float],
    threads: int,
    emit: Emit,
    job_prefix: str = "",
) -> ErrorCurve:
    return error_curve(
        config.observable(),
        g_list,
        times,
        discretization=discretization,
        generator=build_generator(d),
        beta=config.beta,
        settings=config.oracle_settings(),
        max_workers=threads,
        emit=emit,
        job_prefix=job_prefix,
    )


def run_oracle_compare(
    config: RunConfig,
    out: OutputDirectory,
    *,
    threads: int = 1,
    emit: Emit = _noop,
) -> OracleReport:
    """Sup-norm error of the Markov approximation against the truncated-Fock model."""
    kernel = config.kernel()
    d = d_coefficients(kernel)
    discretization = _discretize(config, kernel)
    times = oracle_times(config, d, discretization)
    emit(RunStarted(command="oracle-compare", total_jobs=len(config.g_list) + 1))
    curve = _compare(config, discretization, d, times, config.g_list, threads, emit)
    runs = [curve.baseline, *curve.runs]
    out.csv(
        "error_traces.csv",
        ["t", *(f"g={r.g!r}" for r in runs)],
        [
            (float(t), *(float(r.trace[k]) for r in runs))
            for k, t in enumerate(curve.times)
        ],
    )
    if config.output.checkpoints:
        for r in runs:
            flat = r.reduced.reshape(r.reduced.shape[0], 4)
            out.csv(
                f"reduced_{r.g!r}.csv",
                ["t", "re_00", "im_00", "re_01", "im_01", "re_10", "im_10", "re_11", "im_11"],
                [
                    (float(t), *(x for z in row for x in (float(z.real), float(z.imag))))
                    for t, row in zip(curve.times, flat, strict=True)
                ],
            )
    positive = sorted((r for r in curve.runs if r.g > 0), key=lambda r: r.g)
    if positive:
        gs = [r.g for r in positive]
        anchor = positive[-1]
        reference = [anchor.sup_error * (g / anchor.g) ** 2 for g in gs]
        out.svg(
            "error_scaling.svg",
            [
                Series("E(g)", gs, [max(r.sup_error, 1e-300) for r in positive]),
                Series("g^2 reference", gs, [max(v, 1e-300) for v in reference]),
            ],
            xlabel="g",
            ylabel="sup error",
            logx=True,
            logy=True,
            markers=True,
        )
    modes = discretization.modes
    report = OracleReport(
        config=config.to_dict(),
        sigma=config.sigma,
        curve=curve,
        window=float(times[-1]),
        dimension=TruncatedSpace.expected_dimension(modes.pool_size, config.oracle.excitation_cap),
        files=list(out.written),
    )
    out.json("oracle_compare.json", report.to_dict())
    emit(RunFinished(command="oracle-compare", status=curve.status))
    return report


def _sweep_config(config: RunConfig, axis: SweepAxis, value: float) -> RunConfig:
    if axis == "n_modes":
        return replace(config, bath=replace(config.bath, n_modes=int(value)))
    if axis == "omega_max":
        return replace(config, bath=replace(config.bath, omega_max=float(value)))
    return replace(config, oracle=replace(config.oracle, excitation_cap=int(value)))


def _check_sweep(axis: str, values: Sequence[float]) -> SweepAxis:
    if not values:
        raise ConfigError("sweep needs at least one value", kind="empty sweep")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep axis must be one of {', '.join(SWEEP_AXES)}, got {axis!r}")
    if axis in ("n_modes", "excitation_cap") and any(v != int(v) or v < 0 for v in values):
        raise ConfigError(f"{axis} values must be nonnegative integers")
    if axis == "n_modes" and any(v < 1 for v in values):
        raise ConfigError("n_modes values must be at least 1")
    if axis == "omega_max" and any(v <= 0 for v in values):
        raise ConfigError("omega_max values must be positive")
    return axis  # pyright: ignore[reportReturnType]


def run_sweep(
    config: RunConfig,
    out: OutputDirectory,
    axis: str,
    values: Sequence[float],
    *,
    oracle: bool = False,
    threads: int = 1,
    emit: Emit = _noop,
) -> SweepReport:
    """Watch the kernel window error (and optionally ``E(g)``) along one axis.

    All points share one working window: the shortest default window among
    the swept configurations, so values are comparable.

    Raises:
        ConfigError: If ``values`` is empty or the axis is unknown.
    """
    checked = _check_sweep(axis, values)
    with_oracle = oracle or checked == "excitation_cap"
    kernel = config.kernel()
    d = d_coefficients(kernel)
    configs = [_sweep_config(config, checked, v) for v in values]
    windows = [_discretize(c, kernel).window for c in configs]
    window = min(windows)
    emit(RunStarted(command="sweep", total_jobs=len(configs)))

    def point(item: tuple[int, float, RunConfig]) -> SweepRow:
        index, value, c = item
        label = f"[{index}] {checked}={value:g}"
        discretization = _discretize(c, kernel, window=window)
        if not with_oracle:
            emit(JobStarted(job=label, total=1))
            emit(JobFinished(job=label, seconds=0.0, summary=f"{discretization.window_error:.3e}"))
            return SweepRow(value=value, window_error=discretization.window_error)
        times = oracle_times(c, d, discretization, g_min=c.g)
        curve = _compare(c, discretization, d, times, [c.g], 1, emit, job_prefix=f"{label} ")
        return SweepRow(
            value=value,
            window_error=discretization.window_error,
            sup_error=curve.runs[0].sup_error,
            status=curve.status,
        )

    items = [(i, v, c) for i, (v, c) in enumerate(zip(values, configs, strict=True))]
    rows = _map_jobs(point, items, threads)
    header = ["value", "window_error"]
    if with_oracle:
        header += ["sup_error", "status"]
    out.csv(
        f"sweep_{checked}.csv",
        header,
        [
            (float(r.value), r.window_error)
            + ((r.sup_error, r.status) if with_oracle else ())
            for r in rows
        ],
    )
    report = SweepReport(
        config=config.to_dict(),
        axis=checked,
        quantity="sup_error" if with_oracle else "window_error",
        rows=rows,
        files=list(out.written),
    )
    out.json("sweep.json", report.to_dict())
    emit(RunFinished(command="sweep", status="ok"))
    return report
