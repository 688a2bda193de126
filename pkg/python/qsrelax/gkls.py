"""GKLS generator of spin relaxation and its semigroup.

Everything is represented as a 4x4 matrix acting on ladder-coefficient
vectors ``(c_I, c₊, c₀, c₋)``. In that basis the generator is block
triangular: ``σ(±1)`` are eigenvectors and ``{I, σ(0)}`` form a 2x2
triangular block.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from . import spin_algebra as sa
from .errors import DefectiveGeneratorError
from .photon_kernel import BathKernel, DCoefficients, finite_time_coefficients
from .spin_algebra import SpinObservable

logger = logging.getLogger(__name__)

Matrix4 = NDArray[np.complex128]
HeisenbergMap = Callable[[SpinObservable], SpinObservable]

#: Eigenvector conditioning above which exponentials switch to scaling-and-squaring.
_CONDITION_LIMIT: Final = 1e8
_RATE_TOLERANCE: Final = 1e-12

EIGEN_LABELS: Final = ("identity", "sigma(1)", "sigma(0)+I", "sigma(-1)")


def _jump_products() -> dict[int, SpinObservable]:
    return {m: sa.ladder(m) @ sa.ladder(-m) for m in sa.LADDER_INDICES}


def lamb_shift_hamiltonian(d: DCoefficients) -> SpinObservable:
    """``H_L = Σ_m (Im d_m) σ(m)σ(m)†``."""
    out = sa.zero()
    for m, prod in _jump_products().items():
        out += d[m].imag * prod
    return out


def apply_direct(d: DCoefficients, a: ArrayLike) -> SpinObservable:
    """Evaluate the defining sum of the generator by plain matrix products.

    ``L(A) = Σ_m Re d_m [σ(m) A σ(m)† - ½{A, σ(m)σ(m)†}] - (i/2)[A, H_L]``.
    """
    obs = sa.as_observable(a)
    out = sa.zero()
    for m in sa.LADDER_INDICES:
        s, s_dag = sa.ladder(m), sa.ladder(-m)
        prod = s @ s_dag
        out += d[m].real * (s @ obs @ s_dag - 0.5 * (obs @ prod + prod @ obs))
    h_l = lamb_shift_hamiltonian(d)
    out -= 0.5j * (obs @ h_l - h_l @ obs)
    return out


def redfield_apply(d: DCoefficients, a: ArrayLike) -> SpinObservable:
    """Second-order (commutator) form of the generator.

    ``½ Σ_m [-conj(d_{-m}) σ(-m)[σ(m), A] + d_m [σ(m), A] σ(-m)]``. For any
    complex ``d`` this coincides with :func:`apply_direct`, which is what lets
    the time-truncated coefficients reuse the GKLS assembly.
    """
    obs = sa.as_observable(a)
    out = sa.zero()
    for m in sa.LADDER_INDICES:
        s, s_conj = sa.ladder(m), sa.ladder(-m)
        comm = s @ obs - obs @ s
        out += -np.conj(d[-m]) * (s_conj @ comm) + d[m] * (comm @ s_conj)
    return 0.5 * out


def _representation(d: DCoefficients) -> Matrix4:
    columns = [sa.to_ladder_vector(apply_direct(d, b)) for b in sa.ladder_basis()]
    return np.column_stack(columns)


@dataclass(frozen=True, slots=True)
class GklsGenerator:
    """Generator ``L`` in the ladder basis, before the ``g²`` scaling."""

    matrix4: Matrix4
    d: DCoefficients
    h_l: SpinObservable

    def apply(self, a: ArrayLike) -> SpinObservable:
        return apply(self, a)


def build_generator(d: DCoefficients, *, allow_negative_rates: bool = False) -> GklsGenerator:
    """Assemble ``L`` from the coefficients.

    Args:
        d: The coefficients ``d_m``.
        allow_negative_rates: Skip the ``Re d₁ >= 0`` check. Used for
            time-truncated coefficients and for deliberately corrupted
            generators.

    Raises:
        ValueError: If ``Re d₁`` is negative and ``allow_negative_rates`` is false.
    """
    if not allow_negative_rates and d.d1.real < -_RATE_TOLERANCE:
        raise ValueError(f"Re d1 must be nonnegative, got {d.d1.real:.6g}")
    return GklsGenerator(matrix4=_representation(d), d=d, h_l=lamb_shift_hamiltonian(d))


def apply(generator: GklsGenerator, a: ArrayLike) -> SpinObservable:
    """``L(A)`` through the 4x4 representation."""
    return sa.from_ladder_vector(generator.matrix4 @ sa.to_ladder_vector(a))


def closed_form_eigenvalues(d: DCoefficients) -> dict[str, complex]:
    """Eigenvalues read off the ladder-basis structure, keyed by eigenvector label."""
    rate = d.d1.real
    shift = d.frequency_shift
    return {
        "identity": 0j,
        "sigma(1)": complex(-rate, shift),
        "sigma(0)+I": complex(-2.0 * rate, 0.0),
        "sigma(-1)": complex(-rate, -shift),
    }


def closed_form_eigenvectors() -> dict[str, SpinObservable]:
    return {
        "identity": sa.identity(),
        "sigma(1)": sa.ladder(1),
        "sigma(0)+I": sa.ladder(0) + sa.identity(),
        "sigma(-1)": sa.ladder(-1),
    }


@dataclass(frozen=True, slots=True)
class Eigenpair:
    label: str
    value: complex
    vector: SpinObservable


def _label(vec: NDArray[np.complex128]) -> str:
    mags = np.abs(vec)
    dominant = int(np.argmax(mags))
    if dominant in (1, 3):
        return EIGEN_LABELS[dominant]
    if mags[2] <= 1e-8 * mags.max():
        return "identity"
    return "sigma(0)+I"


def eigensystem(generator: GklsGenerator) -> list[Eigenpair]:
    """Four eigenpairs of ``L`` in :data:`EIGEN_LABELS` order.

    Eigenvectors are scaled so their largest ladder coefficient is 1.

    Raises:
        DefectiveGeneratorError: If the numerical eigenvectors do not span the
            observable space.
    """
    values, vectors = np.linalg.eig(generator.matrix4)
    cond = float(np.linalg.cond(vectors))
    if not np.isfinite(cond) or cond > 1.0 / np.finfo(float).eps / 1e4:
        raise DefectiveGeneratorError(
            f"eigenvector matrix is singular (condition {cond:.3g}); generator is defective"
        )
    pairs: dict[str, Eigenpair] = {}
    for k in range(4):
        vec = vectors[:, k]
        vec = vec / vec[int(np.argmax(np.abs(vec)))]
        label = _label(vec)
        if label in pairs:
            raise DefectiveGeneratorError(f"two eigenvectors classified as {label}")
        pairs[label] = Eigenpair(
            label=label, value=complex(values[k]), vector=sa.from_ladder_vector(vec)
        )
    return [pairs[label] for label in EIGEN_LABELS]


def spectral_gap(pairs: Sequence[Eigenpair]) -> float:
    """Smallest ``|Re λ|`` over the nonzero eigenvalues."""
    nonzero = [abs(p.value.real) for p in pairs if p.label != "identity"]
    return min(nonzero)


def eigen_residual(generator: GklsGenerator) -> float:
    """Largest distance between numerical and closed-form eigenvalues."""
    expected = closed_form_eigenvalues(generator.d)
    return max(abs(p.value - expected[p.label]) for p in eigensystem(generator))


def _expm(matrix: Matrix4, tau: float) -> Matrix4:
    values, vectors = np.linalg.eig(matrix)
    if np.linalg.cond(vectors) < _CONDITION_LIMIT:
        return (vectors * np.exp(tau * values)) @ np.linalg.inv(vectors)
    logger.debug("ill-conditioned eigenvectors, using scaling and squaring")
    return scipy.linalg.expm(tau * matrix)


@dataclass(frozen=True, slots=True)
class Semigroup:
    """``e^{τL}`` in the Heisenberg picture."""

    tau: float
    matrix4: Matrix4

    def apply(self, a: ArrayLike) -> SpinObservable:
        return sa.from_ladder_vector(self.matrix4 @ sa.to_ladder_vector(a))

    def compose(self, other: Semigroup) -> Semigroup:
        """``self ∘ other``."""
        return Semigroup(tau=self.tau + other.tau, matrix4=self.matrix4 @ other.matrix4)

    def predual_apply(self, rho: ArrayLike) -> SpinObservable:
        return predual(self.apply, rho)


def semigroup(generator: GklsGenerator, tau: float) -> Semigroup:
    """``e^{τL}``; callers pass ``τ = t g²``.

    Raises:
        ValueError: If ``tau`` is negative.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    if tau == 0:
        return Semigroup(tau=0.0, matrix4=np.eye(4, dtype=np.complex128))
    return Semigroup(tau=tau, matrix4=_expm(generator.matrix4, tau))


def _unit(k: int, l: int) -> SpinObservable:
    e = sa.zero()
    e[k, l] = 1.0
    return e


def predual(heisenberg: HeisenbergMap, rho: ArrayLike) -> SpinObservable:
    """Schrödinger-picture dual of a Heisenberg map.

    ``(Φ*(ρ))_{kl} = tr(ρ Φ(E_{lk}))``, so that ``tr(Φ*(ρ) A) = tr(ρ Φ(A))``.
    """
    state = sa.as_observable(rho)
    out = sa.zero()
    for k in range(2):
        for l in range(2):
            out[k, l] = np.trace(state @ heisenberg(_unit(l, k)))
    return out


@dataclass(slots=True)
class CpReport:
    """Structural certificate for a semigroup element."""

    tau: float
    choi_eigenvalues: list[float]
    min_choi_eigenvalue: float
    trace_preservation_defect: float
    unitality_defect: float
    hermiticity_defect: float
    tolerance: float = 1e-10

    @property
    def passed(self) -> bool:
        return (
            self.min_choi_eigenvalue >= -self.tolerance
            and self.trace_preservation_defect <= self.tolerance
            and self.unitality_defect <= self.tolerance
        )


def choi_matrix(s: Semigroup) -> NDArray[np.complex128]:
    """``C = Σ_ij E_ij ⊗ Φ*(E_ij)`` for the predual of ``s``."""
    choi = np.zeros((4, 4), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            choi += np.kron(_unit(i, j), s.predual_apply(_unit(i, j)))
    return choi


def verify_cp(s: Semigroup, tolerance: float = 1e-10) -> CpReport:
    """Certify complete positivity, trace preservation and unitality.

    Trace preservation is read from the partial trace of the Choi matrix
    over the output factor; unitality from ``e^{τL}(I)`` directly.
    """
    choi = choi_matrix(s)
    herm = float(np.max(np.abs(choi - choi.conj().T)))
    eigs = np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))
    partial = np.einsum("iaja->ij", choi.reshape(2, 2, 2, 2))
    tp_defect = sa.operator_norm(partial - sa.identity())
    unital_defect = sa.operator_norm(s.apply(sa.identity()) - sa.identity())
    return CpReport(
        tau=s.tau,
        choi_eigenvalues=[float(e) for e in eigs],
        min_choi_eigenvalue=float(eigs[0]),
        trace_preservation_defect=tp_defect,
        unitality_defect=unital_defect,
        hermiticity_defect=herm,
        tolerance=tolerance,
    )


def finite_time_generator(kernel: BathKernel, t: float) -> GklsGenerator:
    """``L(t)``: the generator built from ``d_m(t) = ∫₀^t u(s) e^{2imβs} ds``."""
    return build_generator(finite_time_coefficients(kernel, t), allow_negative_rates=True)


def markov_defect(
    kernel: BathKernel, generator: GklsGenerator, times: Sequence[float]
) -> list[float]:
    """Operator-norm distance ``‖L(t) - L‖`` of the 4x4 representations."""
    return [
        float(np.linalg.norm(finite_time_generator(kernel, t).matrix4 - generator.matrix4, 2))
        for t in times
    ]
