"""Vacuum-reduced Heisenberg dynamics ``σ₀(S(t, σ))`` of the full model."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Final, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .. import spin_algebra as sa
from ..spin_algebra import ExternalField, SpinObservable
from .hamiltonian import FullHamiltonian
from .krylov import DensePropagator, KrylovSettings, StateVector, propagate

logger = logging.getLogger(__name__)

PropagatorChoice = Literal["auto", "dense", "krylov"]
PROPAGATOR_CHOICES: Final[tuple[PropagatorChoice, ...]] = ("auto", "dense", "krylov")
NORM_TOLERANCE: Final = 1e-9


@dataclass(frozen=True, slots=True)
class PropagationSettings:
    method: PropagatorChoice = "auto"
    dense_threshold: int = 2000
    krylov: KrylovSettings = field(default_factory=KrylovSettings)

    def use_dense(self, dimension: int) -> bool:
        if self.method == "auto":
            return dimension <= self.dense_threshold
        return self.method == "dense"


def evolve_state(
    h: FullHamiltonian,
    psi: ArrayLike,
    t: float,
    settings: PropagationSettings | None = None,
) -> StateVector:
    """``e^{-itH}ψ`` for a normalised state.

    Raises:
        ValueError: If ``ψ`` is not normalised or has the wrong length.
        KrylovError: If Lanczos propagation does not converge.
    """
    settings = settings or PropagationSettings()
    state = np.asarray(psi, dtype=np.complex128)
    if state.shape != (h.dimension,):
        raise ValueError(f"state has shape {state.shape}, expected ({h.dimension},)")
    norm = float(np.linalg.norm(state))
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise ValueError(f"state must be normalised, got norm {norm:.12g}")
    if settings.use_dense(h.dimension):
        return DensePropagator(h.matrix).apply(state, t)
    return propagate(h.matrix, state, t, settings.krylov)


@dataclass(frozen=True, slots=True)
class ReducedDynamics:
    """Gram tensors of the two propagated vacuum states.

    ``gram[k, a, s, b, s'] = Σ_photon conj(ψ_a[p, s]) ψ_b[p, s']`` at
    ``times[k]``, with ``ψ_a = e^{-itH}(Ψ₀ ⊗ e_a)``. Any reduced observable
    follows by contraction, without propagating again.
    """

    times: NDArray[np.float64]
    gram: NDArray[np.complex128]

    def reduced(self, sigma: ArrayLike) -> NDArray[np.complex128]:
        """``σ₀(S(t, σ))`` for every stored time, shape ``(n_times, 2, 2)``."""
        return np.einsum("kasbu,su->kab", self.gram, sa.as_observable(sigma))

    def at(self, index: int, sigma: ArrayLike) -> SpinObservable:
        return np.einsum("asbu,su->ab", self.gram[index], sa.as_observable(sigma))

    def norm_defect(self) -> float:
        """Largest deviation of ``⟨ψ_a, ψ_b⟩`` from ``δ_ab``."""
        overlaps = np.einsum("kasbs->kab", self.gram)
        return float(np.max(np.abs(overlaps - np.eye(2)[None])))


def _gram(psi_up: StateVector, psi_down: StateVector) -> NDArray[np.complex128]:
    stacked = np.stack([psi_up.reshape(-1, 2), psi_down.reshape(-1, 2)])
    return np.einsum("aps,bpu->asbu", stacked.conj(), stacked)


def propagate_vacuum_pair(
    h: FullHamiltonian,
    times: ArrayLike,
    settings: PropagationSettings | None = None,
    progress: Callable[[int], None] | None = None,
) -> ReducedDynamics:
    """Propagate ``Ψ₀ ⊗ |↑⟩`` and ``Ψ₀ ⊗ |↓⟩`` across an ascending grid.

    Above the dense threshold each grid interval is one Lanczos restart
    sequence started from the previous grid point.

    Args:
        h: Full Hamiltonian.
        times: Nonnegative, nondecreasing grid.
        settings: Propagator choice and tolerances.
        progress: Called with the number of completed grid points.
    """
    settings = settings or PropagationSettings()
    grid = np.atleast_1d(np.asarray(times, dtype=np.float64))
    if np.any(grid < 0) or np.any(np.diff(grid) < 0):
        raise ValueError("times must be nonnegative and nondecreasing")
    states = [h.space.vacuum_state(sa.named_state(name)) for name in ("up", "down")]
    gram = np.empty((grid.size, 2, 2, 2, 2), dtype=np.complex128)
    dense = DensePropagator(h.matrix) if settings.use_dense(h.dimension) else None
    previous = 0.0
    for k, t in enumerate(grid):
        if dense is not None:
            current = [dense.apply(psi, float(t)) for psi in states]
        else:
            step = float(t) - previous
            states = [propagate(h.matrix, psi, step, settings.krylov) for psi in states]
            previous = float(t)
            current = states
        gram[k] = _gram(current[0], current[1])
        if progress is not None:
            progress(k + 1)
    dynamics = ReducedDynamics(times=grid, gram=gram)
    logger.debug(
        "vacuum pair propagated over %d times (%s), norm defect %.2e",
        grid.size,
        "dense" if dense is not None else "krylov",
        dynamics.norm_defect(),
    )
    return dynamics


def reduced_observable(
    h: FullHamiltonian,
    sigma: ArrayLike,
    t: float,
    settings: PropagationSettings | None = None,
) -> SpinObservable:
    """``σ₀(S(t, σ))_{ab} = ⟨e^{-itH}(Ψ₀⊗a), (I⊗σ) e^{-itH}(Ψ₀⊗b)⟩``."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return propagate_vacuum_pair(h, [t], settings).at(0, sigma)


def sred_observable(
    dynamics: ReducedDynamics, beta: float, sigma: ArrayLike, index: int
) -> SpinObservable:
    """``σ₀(S(t, γ_{-t}σ))`` at ``dynamics.times[index]`` by pre-rotating ``σ``."""
    t = float(dynamics.times[index])
    if beta == 0:
        return dynamics.at(index, sigma)
    return dynamics.at(index, sa.free_evolve(-t, ExternalField.along_z(beta), sigma))


def sred_consistency(
    h: FullHamiltonian,
    sigma: ArrayLike,
    t: float,
    settings: PropagationSettings | None = None,
    dynamics: ReducedDynamics | None = None,
) -> float:
    """Defect between two evaluations of ``σ₀(S(t, γ_{-t}σ))``.

    One side pre-rotates ``σ`` with the exact free evolution. The other
    contracts the reduced ladder operators and applies the phases
    ``e^{-2imβt}`` afterwards. Both sides share the propagated vacuum pair,
    so this checks the contraction and phase algebra, not the propagation.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if dynamics is None:
        dynamics = propagate_vacuum_pair(h, [t], settings)
        index = 0
    else:
        matches = np.flatnonzero(np.isclose(dynamics.times, t, rtol=0.0, atol=1e-12))
        if matches.size == 0:
            raise ValueError(f"time {t} is not on the propagated grid")
        index = int(matches[0])
    pre = sred_observable(dynamics, h.beta, sigma, index)
    c_i, c_p, c_0, c_m = sa.decompose(sigma)
    phase = np.exp(-2j * h.beta * t)
    post = (
        c_i * dynamics.at(index, sa.identity())
        + c_p * phase * dynamics.at(index, sa.ladder(1))
        + c_0 * dynamics.at(index, sa.ladder(0))
        + c_m * np.conj(phase) * dynamics.at(index, sa.ladder(-1))
    )
    return sa.operator_norm(pre - post)
