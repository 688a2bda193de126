"""The Markov approximation ``e^{tg²L} γ_t σ`` and the trajectories built on it.

The generator is diagonalised once per :class:`MarkovPropagator`; every time
point then costs a handful of scalar exponentials.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final, Literal

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from . import spin_algebra as sa
from .errors import HermiticityError
from .gkls import GklsGenerator, Matrix4, predual
from .photon_kernel import DCoefficients
from .spin_algebra import SpinObservable

logger = logging.getLogger(__name__)

TrajectoryKind = Literal["bloch", "ladder"]

BLOCH_COLUMNS: Final = ("sx", "sy", "sz")
LADDER_COLUMNS: Final = ("re_cI", "re_cp", "im_cp", "re_c0", "re_cm", "im_cm")

#: Imaginary parts of expectation values below this are rounding noise.
IMAG_TOLERANCE: Final = 1e-10
BLOCH_SLACK: Final = 1e-9
EQUILIBRIUM: Final = (0.0, 0.0, -1.0)


@dataclass(frozen=True, slots=True)
class Trajectory:
    """Values of a run over an ascending time grid.

    ``values`` has one row per time: the Bloch triple for ``kind="bloch"``,
    the complex ladder coefficients ``(c_I, c₊, c₀, c₋)`` for ``kind="ladder"``.
    """

    times: NDArray[np.float64]
    values: NDArray[np.float64] | NDArray[np.complex128]
    kind: TrajectoryKind
    g: float

    def __post_init__(self) -> None:
        if self.times.ndim != 1 or self.values.shape[0] != self.times.shape[0]:
            raise ValueError("times and values must have matching lengths")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def column(self, name: str) -> NDArray[np.float64]:
        if self.kind == "bloch":
            return np.asarray(self.values[:, BLOCH_COLUMNS.index(name)], dtype=np.float64)
        return self.rows()[:, LADDER_COLUMNS.index(name)]

    @property
    def columns(self) -> tuple[str, ...]:
        return BLOCH_COLUMNS if self.kind == "bloch" else LADDER_COLUMNS

    def rows(self) -> NDArray[np.float64]:
        """Real table matching :attr:`columns`."""
        if self.kind == "bloch":
            return np.asarray(self.values, dtype=np.float64)
        c = np.asarray(self.values, dtype=np.complex128)
        return np.column_stack(
            [c[:, 0].real, c[:, 1].real, c[:, 1].imag, c[:, 2].real, c[:, 3].real, c[:, 3].imag]
        )


class MarkovPropagator:
    """Evaluates ``S(t) = e^{tg²L} γ_t`` as 4x4 ladder-basis matrices."""

    def __init__(self, generator: GklsGenerator, beta: float) -> None:
        super().__init__()
        if beta <= 0:
            raise ValueError(f"beta must be positive, got {beta}")
        self.generator = generator
        self.beta = beta
        values, vectors = np.linalg.eig(generator.matrix4)
        self._values = values
        self._vectors: Matrix4 | None = None
        self._inverse: Matrix4 | None = None
        if np.linalg.cond(vectors) < 1e8:
            self._vectors = vectors
            self._inverse = np.linalg.inv(vectors)
        else:
            logger.debug("generator is close to defective; falling back to expm per time")

    def _gamma(self, t: float) -> NDArray[np.complex128]:
        return np.diag(sa.free_evolution_superoperator(t, self.beta))

    def superoperator(self, t: float, g: float) -> Matrix4:
        """Matrix of ``σ ↦ e^{tg²L} γ_t σ``."""
        if t < 0 or g < 0:
            raise ValueError(f"t and g must be nonnegative, got t={t}, g={g}")
        tau = t * g * g
        if tau == 0.0:
            semigroup = np.eye(4, dtype=np.complex128)
        elif self._vectors is not None and self._inverse is not None:
            semigroup = (self._vectors * np.exp(tau * self._values)) @ self._inverse
        else:
            semigroup = scipy.linalg.expm(tau * self.generator.matrix4)
        return semigroup * self._gamma(t)[None, :]

    def superoperators(self, times: Sequence[float], g: float) -> NDArray[np.complex128]:
        return np.stack([self.superoperator(float(t), g) for t in times])

    def approx_heisenberg(self, t: float, g: float, sigma: ArrayLike) -> SpinObservable:
        return sa.from_ladder_vector(self.superoperator(t, g) @ sa.to_ladder_vector(sigma))

    def evolve_density(self, rho: ArrayLike, t: float, g: float) -> SpinObservable:
        """Schrödinger-picture state at time ``t``, dual to :meth:`approx_heisenberg`."""
        return predual(lambda a: self.approx_heisenberg(t, g, a), rho)

    def bloch_trajectory(self, a: ArrayLike, times: ArrayLike, g: float) -> Trajectory:
        """Bloch vector ``⟨a|e^{tg²L}γ_t σ_j|a⟩`` over ``times``.

        Raises:
            ValueError: If ``a`` is not a unit spinor.
            HermiticityError: If an expectation value has an imaginary part
                above :data:`IMAG_TOLERANCE`.
        """
        psi = sa.normalized_spinor(a, atol=1e-9)
        grid = _grid(times)
        basis_expect = np.array([sa.expectation(b, psi) for b in sa.ladder_basis()])
        paulis = np.column_stack([sa.to_ladder_vector(sa.pauli(j)) for j in (1, 2, 3)])
        ops = self.superoperators(grid, g)
        raw = np.einsum("k,tkl,lj->tj", basis_expect, ops, paulis)
        worst = float(np.max(np.abs(raw.imag))) if raw.size else 0.0
        if worst > IMAG_TOLERANCE:
            raise HermiticityError(f"Bloch component has imaginary part {worst:.3e}")
        values = raw.real
        if np.any(np.abs(values) > 1.0 + BLOCH_SLACK):
            raise HermiticityError("Bloch component outside [-1, 1]")
        return Trajectory(times=grid, values=values, kind="bloch", g=g)

    def ladder_trajectory(self, sigma: ArrayLike, times: ArrayLike, g: float) -> Trajectory:
        """Ladder coefficients of ``e^{tg²L}γ_t σ`` over ``times``."""
        grid = _grid(times)
        vec = sa.to_ladder_vector(sigma)
        values = np.einsum("tkl,l->tk", self.superoperators(grid, g), vec)
        return Trajectory(times=grid, values=values, kind="ladder", g=g)


def _grid(times: ArrayLike) -> NDArray[np.float64]:
    grid = np.atleast_1d(np.asarray(times, dtype=np.float64))
    if np.any(grid < 0):
        raise ValueError("times must be nonnegative")
    return grid


def approx_heisenberg(
    t: float, g: float, sigma: ArrayLike, generator: GklsGenerator, beta: float
) -> SpinObservable:
    """``e^{tg²L}(γ_t σ)``; at ``g = 0`` this is ``γ_t σ`` and at ``t = 0`` it is ``σ``."""
    return MarkovPropagator(generator, beta).approx_heisenberg(t, g, sigma)


def bloch_trajectory(
    a: ArrayLike, times: ArrayLike, g: float, generator: GklsGenerator, beta: float
) -> Trajectory:
    return MarkovPropagator(generator, beta).bloch_trajectory(a, times, g)


def evolve_density(
    rho: ArrayLike, t: float, g: float, generator: GklsGenerator, beta: float
) -> SpinObservable:
    return MarkovPropagator(generator, beta).evolve_density(rho, t, g)


@dataclass(slots=True)
class RelaxationRates:
    """Rates read off the generator spectrum, already scaled by ``g²``."""

    g: float
    longitudinal_rate: float
    transverse_rate: float
    frequency_shift: float

    @property
    def t1(self) -> float:
        return math.inf if self.longitudinal_rate == 0 else 1.0 / self.longitudinal_rate

    @property
    def t2(self) -> float:
        return math.inf if self.transverse_rate == 0 else 1.0 / self.transverse_rate


def relaxation_rates(g: float, d: DCoefficients) -> RelaxationRates:
    """``2g²Re d₁``, ``g²Re d₁`` and ``g²(Im d₁ - Im d₋₁)``.

    Raises:
        ValueError: If ``g`` is not positive.
    """
    if g <= 0:
        raise ValueError(f"coupling must be positive, got {g}")
    g2 = g * g
    return RelaxationRates(
        g=g,
        longitudinal_rate=2.0 * g2 * d.d1.real,
        transverse_rate=g2 * d.d1.real,
        frequency_shift=g2 * d.frequency_shift,
    )


@dataclass(slots=True)
class FittedRates:
    longitudinal_rate: float
    transverse_rate: float
    samples: int


def _log_slope(times: NDArray[np.float64], values: NDArray[np.float64]) -> tuple[float, int]:
    mask = values > 1e-12
    if np.count_nonzero(mask) < 2:
        raise ValueError("not enough positive samples to fit a decay rate")
    slope, _ = np.polyfit(times[mask], np.log(values[mask]), 1)
    return -float(slope), int(np.count_nonzero(mask))


def fit_relaxation(longitudinal: Trajectory, transverse: Trajectory) -> FittedRates:
    """Log-linear fits of the two relaxation channels.

    Args:
        longitudinal: Bloch trajectory started from spin up; fits ``⟨σ₃⟩ + 1``.
        transverse: Bloch trajectory started in the equatorial plane; fits
            the length of ``(⟨σ₁⟩, ⟨σ₂⟩)``.
    """
    if longitudinal.kind != "bloch" or transverse.kind != "bloch":
        raise ValueError("relaxation fits need Bloch trajectories")
    gamma1, n1 = _log_slope(longitudinal.times, longitudinal.column("sz") + 1.0)
    planar = np.hypot(transverse.column("sx"), transverse.column("sy"))
    gamma2, n2 = _log_slope(transverse.times, planar)
    return FittedRates(longitudinal_rate=gamma1, transverse_rate=gamma2, samples=min(n1, n2))


def equilibrium_distance(trajectory: Trajectory) -> NDArray[np.float64]:
    """Distance of each Bloch vector from the fixed point ``(0, 0, -1)``."""
    if trajectory.kind != "bloch":
        raise ValueError("equilibrium distance needs a Bloch trajectory")
    return np.linalg.norm(trajectory.rows() - np.array(EQUILIBRIUM), axis=1)
