"""Short-iterative Lanczos propagation of ``e^{-iHt}ψ`` for Hermitian sparse ``H``."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from numpy.typing import NDArray

from ..errors import KrylovError

logger = logging.getLogger(__name__)

StateVector = NDArray[np.complex128]


@dataclass(frozen=True, slots=True)
class KrylovSettings:
    krylov_dim: int = 24
    #: Accepted error estimate per substep.
    tol: float = 1e-11
    max_substeps: int = 100_000

    def __post_init__(self) -> None:
        if self.krylov_dim < 2:
            raise ValueError("krylov_dim must be at least 2")
        if self.tol <= 0:
            raise ValueError("Krylov tolerance must be positive")


@dataclass(slots=True)
class _LanczosBasis:
    vectors: NDArray[np.complex128]
    alpha: NDArray[np.float64]
    beta: NDArray[np.float64]
    #: Coupling of the last basis vector to the rest of the space; 0 on breakdown.
    tail: float

    @property
    def size(self) -> int:
        return int(self.alpha.size)


def _lanczos(matrix: sp.csr_matrix, v: StateVector, m: int) -> _LanczosBasis:
    """Lanczos recursion with full reorthogonalisation; ``v`` must be normalised."""
    n = v.size
    m = min(m, n)
    basis = np.zeros((m, n), dtype=np.complex128)
    alpha = np.zeros(m)
    beta = np.zeros(m)
    basis[0] = v
    tail = 0.0
    k = 0
    for k in range(m):
        w = matrix @ basis[k]
        alpha[k] = float(np.vdot(basis[k], w).real)
        w = w - alpha[k] * basis[k]
        if k > 0:
            w = w - beta[k - 1] * basis[k - 1]
        w = w - basis[: k + 1].T @ (basis[: k + 1].conj() @ w)
        b = float(np.linalg.norm(w))
        if k == m - 1:
            tail = b
            break
        if b < 1e-13:
            logger.debug("Lanczos breakdown at step %d", k + 1)
            break
        beta[k] = b
        basis[k + 1] = w / b
    size = k + 1
    return _LanczosBasis(
        vectors=basis[:size], alpha=alpha[:size], beta=beta[: size - 1], tail=tail
    )


def _projected_propagator(
    basis: _LanczosBasis,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    if basis.size == 1:
        return basis.alpha.copy(), np.ones((1, 1))
    return scipy.linalg.eigh_tridiagonal(basis.alpha, basis.beta)


def propagate(
    matrix: sp.csr_matrix, psi: StateVector, t: float, settings: KrylovSettings | None = None
) -> StateVector:
    """``e^{-iHt}ψ`` by restarted Lanczos steps with adaptive step size.

    Each restart builds a Krylov basis at the current state, then takes the
    largest step (halving from the remaining time) whose error estimate
    ``tail · |e_mᵀ e^{-i dt T} e₁|`` is below ``settings.tol``.

    Raises:
        KrylovError: If the substep budget is exhausted.
    """
    settings = settings or KrylovSettings()
    if t < 0:
        raise ValueError(f"propagation time must be nonnegative, got {t}")
    state = np.array(psi, dtype=np.complex128)
    norm = float(np.linalg.norm(state))
    if t == 0 or norm == 0:
        return state
    state /= norm
    remaining = t
    substeps = 0
    residual = 0.0
    while remaining > 0:
        basis = _lanczos(matrix, state, settings.krylov_dim)
        theta, vecs = _projected_propagator(basis)
        first = vecs[0].conj()
        dt = remaining
        while True:
            substeps += 1
            y = vecs @ (np.exp(-1j * dt * theta) * first)
            residual = basis.tail * abs(y[-1])
            if residual <= settings.tol:
                break
            if substeps >= settings.max_substeps:
                raise KrylovError(
                    f"Lanczos propagation stalled after {substeps} substeps"
                    + f" at residual {residual:.3e}",
                    residual=residual,
                )
            dt /= 2.0
        state = basis.vectors.T @ y
        remaining -= dt
        if remaining < 1e-14 * t:
            remaining = 0.0
    logger.debug("propagated to t=%g in %d substeps (last residual %.1e)", t, substeps, residual)
    return norm * state


class DensePropagator:
    """Exact ``e^{-iHt}`` from one Hermitian eigendecomposition."""

    def __init__(self, matrix: sp.csr_matrix | NDArray[np.complex128]) -> None:
        super().__init__()
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
        self.energies, self.vectors = scipy.linalg.eigh(dense)

    def apply(self, psi: StateVector, t: float) -> StateVector:
        coeffs = self.vectors.conj().T @ psi
        return self.vectors @ (np.exp(-1j * self.energies * t) * coeffs)
