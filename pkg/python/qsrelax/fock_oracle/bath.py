"""Discretisation of the photon bath into a finite comb of modes per channel."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, replace
from typing import Final, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import DiscretizationError, RecurrenceGuardError, TailMassError
from ..photon_kernel import BathKernel, spectral_density_array, spectral_mass, u_on_grid

logger = logging.getLogger(__name__)

QuadratureRule = Literal["midpoint", "gauss"]
QUADRATURE_RULES: Final[tuple[QuadratureRule, ...]] = ("midpoint", "gauss")
CHANNELS: Final = (1, 2, 3)


@dataclass(frozen=True, slots=True)
class ModeSet:
    """Identical mode combs for each active polarisation channel.

    Mode ``j`` of channel position ``c`` has pool index ``c * n_modes + j``.
    """

    frequencies: NDArray[np.float64]
    couplings: NDArray[np.float64]
    spacing: float
    active_channels: tuple[int, ...] = CHANNELS

    def __post_init__(self) -> None:
        if self.frequencies.shape != self.couplings.shape or self.frequencies.ndim != 1:
            raise ValueError("frequencies and couplings must be 1-D arrays of equal length")
        if self.frequencies.size == 0:
            raise ValueError("a mode set needs at least one mode")
        if np.any(self.frequencies <= 0):
            raise ValueError("mode frequencies must be positive")
        if np.any(self.couplings < 0):
            raise ValueError("mode couplings must be nonnegative")
        if self.spacing <= 0:
            raise ValueError("mode spacing must be positive")
        if len(set(self.active_channels)) != len(self.active_channels) or not set(
            self.active_channels
        ) <= set(CHANNELS):
            raise ValueError(f"active channels must be distinct values in {CHANNELS}")

    @classmethod
    def single(
        cls, frequency: float, coupling: float, channels: Sequence[int] = CHANNELS
    ) -> ModeSet:
        return cls(
            frequencies=np.array([frequency], dtype=np.float64),
            couplings=np.array([coupling], dtype=np.float64),
            spacing=frequency,
            active_channels=tuple(channels),
        )

    @property
    def n_modes(self) -> int:
        return int(self.frequencies.size)

    @property
    def pool_size(self) -> int:
        return self.n_modes * len(self.active_channels)

    @property
    def recurrence_time(self) -> float:
        return 2.0 * math.pi / self.spacing

    def locate(self, q: int) -> tuple[int, int]:
        """Channel number and mode index of pool index ``q``."""
        pos, j = divmod(q, self.n_modes)
        return self.active_channels[pos], j

    def kernel(self, times: ArrayLike) -> NDArray[np.complex128]:
        """Discrete kernel ``û(t) = Σ_j λ_j² e^{-iω_j t}``."""
        t = np.asarray(times, dtype=np.float64)
        phases = np.exp(-1j * np.multiply.outer(t, self.frequencies))
        return phases @ (self.couplings**2)

    def with_channels(self, channels: Sequence[int]) -> ModeSet:
        return replace(self, active_channels=tuple(channels))


@dataclass(frozen=True, slots=True)
class Discretization:
    """A mode set plus how well it reproduces ``u`` on the working window."""

    modes: ModeSet
    rule: QuadratureRule
    omega_max: float
    window: float
    window_error: float
    tail_mass: float


def _nodes(
    rule: QuadratureRule, omega_max: float, n_modes: int
) -> tuple[NDArray[np.float64], NDArray[np.float64], float]:
    if rule == "midpoint":
        dw = omega_max / n_modes
        nodes = (np.arange(n_modes) + 0.5) * dw
        return nodes, np.full(n_modes, dw), dw
    x, w = np.polynomial.legendre.leggauss(n_modes)
    half = omega_max / 2.0
    return half * (x + 1.0), half * w, omega_max / n_modes


def window_error(kernel: BathKernel, modes: ModeSet, window: float) -> float:
    """``max |û(t) - u(t)|`` over an even grid on ``[0, window]``."""
    n = max(201, math.ceil(8.0 * window) + 1)
    grid = np.linspace(0.0, window, n)
    return float(np.max(np.abs(modes.kernel(grid) - u_on_grid(kernel, grid))))


def discretize_bath(
    kernel: BathKernel,
    omega_max: float,
    n_modes: int,
    rule: QuadratureRule = "midpoint",
    *,
    window: float | None = None,
    recurrence_fraction: float = 0.5,
    tail_tol: float = 1e-10,
    tolerance: float | None = None,
    channels: Sequence[int] = CHANNELS,
) -> Discretization:
    """Sample ``J`` so that ``λ_j² = J(ω_j) Δω_j``.

    Args:
        kernel: Bath kernel to reproduce.
        omega_max: Upper end of the sampled band.
        n_modes: Modes per channel.
        rule: ``midpoint`` (uniform comb) or ``gauss`` (Gauss-Legendre nodes).
        window: Working window ``T_work``; defaults to ``recurrence_fraction``
            of the recurrence time ``2π/Δω``.
        recurrence_fraction: Used only when ``window`` is not given.
        tail_tol: Largest admissible ``∫_{ω_max}^∞ J``.
        tolerance: If set, the window error must not exceed it.
        channels: Active polarisation channels.

    Raises:
        TailMassError: If the spectral mass above ``omega_max`` exceeds ``tail_tol``.
        RecurrenceGuardError: If ``Δω · T_work > 2π``.
        DiscretizationError: If the window error exceeds ``tolerance``.
    """
    if rule not in QUADRATURE_RULES:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    if omega_max <= 0 or n_modes < 1:
        raise ValueError("omega_max must be positive and n_modes at least 1")
    tail = spectral_mass(kernel, omega_max)
    if tail > tail_tol:
        raise TailMassError(f"spectral mass above omega_max={omega_max:g} is {tail:.3e}")
    nodes, weights, spacing = _nodes(rule, omega_max, n_modes)
    couplings = np.sqrt(spectral_density_array(kernel, nodes) * weights)
    modes = ModeSet(
        frequencies=nodes, couplings=couplings, spacing=spacing, active_channels=tuple(channels)
    )
    work = recurrence_fraction * modes.recurrence_time if window is None else window
    if work <= 0:
        raise ValueError("working window must be positive")
    if spacing * work > 2.0 * math.pi * (1.0 + 1e-12):
        raise RecurrenceGuardError(
            f"window {work:g} exceeds the recurrence time {modes.recurrence_time:g}"
            + f" of a comb with spacing {spacing:g}"
        )
    err = window_error(kernel, modes, work)
    logger.info(
        "bath: %d modes/channel (%s) up to %g, window %g, kernel error %.3e",
        n_modes,
        rule,
        omega_max,
        work,
        err,
    )
    if tolerance is not None and err > tolerance:
        raise DiscretizationError(f"kernel reproduction error {err:.3e} exceeds {tolerance:.3e}")
    return Discretization(
        modes=modes, rule=rule, omega_max=omega_max, window=work, window_error=err, tail_mass=tail
    )
