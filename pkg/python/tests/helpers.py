from __future__ import annotations

import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from qsrelax import spin_algebra as sa
from qsrelax.fock_oracle import CHANNELS, Discretization, ModeSet
from qsrelax.photon_kernel import DCoefficients

#: ``π J(2)`` for the default Gaussian cutoff (λ = 4, β = 1).
RE_D1_DEFAULT = 8.0 * math.exp(-0.5) / (3.0 * math.pi)

SYNTHETIC = DCoefficients.from_values([0.5 + 0.3j, -0.2j, -0.1j])


def random_observable(
    rng: np.random.Generator, *, hermitian: bool = False
) -> NDArray[np.complex128]:
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    if hermitian:
        a = 0.5 * (a + a.conj().T)
    return a.astype(np.complex128)


def random_state(rng: np.random.Generator) -> NDArray[np.complex128]:
    """Density matrix of a random pure spinor."""
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def single_mode(
    coupling: float = 1.0, *, beta: float = 1.0, channels: Sequence[int] = CHANNELS
) -> Discretization:
    """One resonant mode per channel at ``ω = 2β``."""
    modes = ModeSet.single(2.0 * beta, coupling, channels)
    return Discretization(
        modes=modes,
        rule="midpoint",
        omega_max=4.0 * beta,
        window=math.pi / beta,
        window_error=0.0,
        tail_mass=0.0,
    )


def comb(n_modes: int = 4, omega_max: float = 6.0, scale: float = 0.3) -> Discretization:
    """A small uniform comb with smooth couplings; no kernel quadrature involved."""
    dw = omega_max / n_modes
    freqs = (np.arange(n_modes) + 0.5) * dw
    couplings = scale * np.sqrt(freqs**3 * np.exp(-freqs) * dw)
    modes = ModeSet(frequencies=freqs, couplings=couplings, spacing=dw)
    return Discretization(
        modes=modes,
        rule="midpoint",
        omega_max=omega_max,
        window=math.pi / dw,
        window_error=0.0,
        tail_mass=0.0,
    )


def bloch_vector(rho: NDArray[np.complex128]) -> NDArray[np.float64]:
    return np.array([np.trace(rho @ sa.pauli(k)).real for k in (1, 2, 3)])


def write_config(directory: Path, text: str, name: str = "run.toml") -> Path:
    path = directory / name
    _ = path.write_text(text, encoding="utf-8")
    return path
