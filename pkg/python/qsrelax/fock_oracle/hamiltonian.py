"""Sparse assembly of the spin-field Hamiltonian on a truncated Fock space."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from .. import spin_algebra as sa
from .bath import ModeSet
from .space import TruncatedSpace

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class FullHamiltonian:
    """``H(g) = H_ph ⊗ I + I ⊗ βσ₃ + g Σ_c Φ_c ⊗ σ_c`` as a CSR matrix."""

    matrix: sp.csr_matrix
    g: float
    beta: float
    space: TruncatedSpace
    modes: ModeSet

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    def hermiticity_defect(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def dense(self) -> NDArray[np.complex128]:
        return np.asarray(self.matrix.toarray(), dtype=np.complex128)


def photon_energies(modes: ModeSet, space: TruncatedSpace) -> NDArray[np.float64]:
    """``Σ_j ω_j n_j`` for each photon basis state."""
    pool_freq = np.tile(modes.frequencies, len(modes.active_channels))
    return np.array([float(pool_freq[list(s)].sum()) for s in space.states])


def field_operators(modes: ModeSet, space: TruncatedSpace) -> dict[int, sp.csr_matrix]:
    """Per-channel field ``Φ_c = Σ_j λ_j (a_j + a_j†)/√2`` on the photon factor.

    With this normalisation the vacuum expectation ``⟨B_c, e^{-itH_ph} B_c⟩``
    of the mode function ``B_c = Σ_j λ_j a_j† Ψ₀`` is the discrete kernel
    ``û(t)``. Creation across the cap is dropped.
    """
    n = space.photon_dimension
    rows: dict[int, list[int]] = {c: [] for c in modes.active_channels}
    cols: dict[int, list[int]] = {c: [] for c in modes.active_channels}
    vals: dict[int, list[float]] = {c: [] for c in modes.active_channels}
    for target, source, q, amp in space.lowering_entries():
        channel, j = modes.locate(q)
        coupling = float(modes.couplings[j])
        if coupling == 0.0:
            continue
        rows[channel].append(target)
        cols[channel].append(source)
        vals[channel].append(coupling * amp)
    out: dict[int, sp.csr_matrix] = {}
    for c in modes.active_channels:
        lowering = sp.coo_matrix((vals[c], (rows[c], cols[c])), shape=(n, n)).tocsr()
        out[c] = ((lowering + lowering.T) / math.sqrt(2.0)).tocsr()
    return out


def build_hamiltonian(
    modes: ModeSet, beta: float, g: float, space: TruncatedSpace
) -> FullHamiltonian:
    """Assemble ``H(g)`` with flat index ``2 · photon + spin``.

    Raises:
        ValueError: If the space was built for a different mode pool, or
            ``g`` or ``beta`` is negative.
    """
    if space.n_modes != modes.pool_size:
        raise ValueError(
            f"space has {space.n_modes} modes but the mode set pools {modes.pool_size}"
        )
    if g < 0 or beta < 0:
        raise ValueError("g and beta must be nonnegative")
    n = space.photon_dimension
    spin_id = sp.identity(2, dtype=np.complex128, format="csr")
    h = sp.kron(sp.diags(photon_energies(modes, space)), spin_id, format="csr")
    h = h + sp.kron(sp.identity(n, format="csr"), sp.csr_matrix(beta * sa.pauli(3)), format="csr")
    if g != 0.0 and space.excitation_cap > 0:
        for channel, phi in field_operators(modes, space).items():
            h = h + g * sp.kron(phi, sp.csr_matrix(sa.pauli(channel)), format="csr")
    matrix = sp.csr_matrix(h, dtype=np.complex128)
    matrix.eliminate_zeros()
    logger.debug("hamiltonian: dimension %d, nnz %d, g=%g", matrix.shape[0], matrix.nnz, g)
    return FullHamiltonian(matrix=matrix, g=g, beta=beta, space=space, modes=modes)
