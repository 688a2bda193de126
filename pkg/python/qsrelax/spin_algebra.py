"""Pauli and ladder algebra for a single spin-1/2.

Observables are plain ``2x2`` complex numpy arrays. The ladder basis
``{I, σ(1), σ(0), σ(-1)}`` diagonalizes the free Larmor evolution and is the
basis every 4x4 superoperator in this package is written in.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

SpinObservable = NDArray[np.complex128]
Spinor = NDArray[np.complex128]
LadderCoefficients = tuple[complex, complex, complex, complex]

SQRT2: Final = math.sqrt(2.0)

#: Order of the ladder basis used for coefficient vectors and 4x4 matrices.
LADDER_ORDER: Final = ("I", 1, 0, -1)
LADDER_INDICES: Final = (1, 0, -1)

_PAULI: Final[dict[int, tuple[tuple[complex, complex], tuple[complex, complex]]]] = {
    1: ((0, 1), (1, 0)),
    2: ((0, -1j), (1j, 0)),
    3: ((1, 0), (0, -1)),
}


@dataclass(frozen=True, slots=True)
class ExternalField:
    """Static external magnetic field, in units absorbed into the Larmor scale."""

    b1: float = 0.0
    b2: float = 0.0
    b3: float = 1.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(b) for b in (self.b1, self.b2, self.b3)):
            raise ValueError("field components must be finite")

    @classmethod
    def along_z(cls, beta: float) -> ExternalField:
        """Canonical configuration ``(0, 0, β)``."""
        if beta <= 0:
            raise ValueError(f"beta must be positive, got {beta}")
        return cls(0.0, 0.0, beta)

    @property
    def components(self) -> tuple[float, float, float]:
        return (self.b1, self.b2, self.b3)

    @property
    def is_zero(self) -> bool:
        return self.b1 == 0.0 and self.b2 == 0.0 and self.b3 == 0.0

    @property
    def is_canonical(self) -> bool:
        return self.b1 == 0.0 and self.b2 == 0.0 and self.b3 > 0.0

    @property
    def beta(self) -> float:
        """Field strength along z; only meaningful for a canonical field."""
        if not self.is_canonical:
            raise ValueError(f"field {self.components} is not of the form (0, 0, beta>0)")
        return self.b3


def as_observable(a: ArrayLike) -> SpinObservable:
    """Coerce ``a`` into a fresh complex 2x2 array.

    Raises:
        ValueError: If ``a`` does not have shape (2, 2).
    """
    arr = np.array(a, dtype=np.complex128)
    if arr.shape != (2, 2):
        raise ValueError(f"spin observable must be 2x2, got shape {arr.shape}")
    return arr


def identity() -> SpinObservable:
    return np.eye(2, dtype=np.complex128)


def zero() -> SpinObservable:
    return np.zeros((2, 2), dtype=np.complex128)


def pauli(j: int) -> SpinObservable:
    """Return the ``j``-th Pauli matrix.

    Raises:
        ValueError: If ``j`` is not 1, 2 or 3.
    """
    if j not in _PAULI:
        raise ValueError(f"Pauli index must be 1, 2 or 3, got {j!r}")
    return np.array(_PAULI[j], dtype=np.complex128)


def ladder(m: int) -> SpinObservable:
    """Return the ladder operator ``σ(m)``.

    ``σ(±1) = (σ₁ ± iσ₂)/√2`` and ``σ(0) = σ₃``. No Hilbert-Schmidt
    renormalization is applied, so ``σ(1) = [[0, √2], [0, 0]]``.

    Raises:
        ValueError: If ``m`` is not 1, 0 or -1.
    """
    if m == 0:
        return pauli(3)
    if m in (1, -1):
        return (pauli(1) + m * 1j * pauli(2)) / SQRT2
    raise ValueError(f"ladder index must be 1, 0 or -1, got {m!r}")


def ladder_basis() -> tuple[SpinObservable, SpinObservable, SpinObservable, SpinObservable]:
    """The basis ``(I, σ(1), σ(0), σ(-1))`` in :data:`LADDER_ORDER`."""
    return (identity(), ladder(1), ladder(0), ladder(-1))


def h_mag(field: ExternalField) -> SpinObservable:
    """Magnetic Hamiltonian ``Σ_m B_m σ_m`` of the spin without the quantized field."""
    out = zero()
    for j, b in enumerate(field.components, start=1):
        out += b * pauli(j)
    return out


def free_evolve(
    t: float, field: ExternalField, a: ArrayLike, *, general: bool = False
) -> SpinObservable:
    """Free Heisenberg evolution ``γ_t A = e^{itH} A e^{-itH}``.

    For the canonical field the closed form ``e^{iβtσ₃} = diag(e^{iβt}, e^{-iβt})``
    is used, so ``γ_t σ(m) = e^{2imβt} σ(m)`` holds to rounding.

    Args:
        t: Time, any real value.
        field: External field.
        a: Observable to evolve.
        general: Accept any field and exponentiate ``H_mag`` exactly instead.

    Raises:
        ValueError: If the field is not along +z and ``general`` is false.
    """
    obs = as_observable(a)
    if field.is_canonical:
        phase = np.exp(1j * field.b3 * t)
        u = np.array([phase, np.conj(phase)])
        return u[:, None] * obs * np.conj(u)[None, :]
    if not general:
        raise ValueError(
            f"free evolution requires a field along +z, got {field.components};"
            + " pass general=True for arbitrary axes"
        )
    u_mat = scipy.linalg.expm(1j * t * h_mag(field))
    return u_mat @ obs @ u_mat.conj().T


def free_evolution_superoperator(t: float, beta: float) -> NDArray[np.complex128]:
    """Matrix of ``γ_t`` in the ladder basis: ``diag(1, e^{2iβt}, 1, e^{-2iβt})``."""
    phase = np.exp(2j * beta * t)
    return np.diag(np.array([1.0, phase, 1.0, np.conj(phase)], dtype=np.complex128))


def decompose(a: ArrayLike) -> LadderCoefficients:
    """Coefficients ``(c_I, c₊, c₀, c₋)`` of ``A`` in the ladder basis."""
    obs = as_observable(a)
    (p, q), (r, s) = obs
    return (
        complex((p + s) / 2),
        complex(q / SQRT2),
        complex((p - s) / 2),
        complex(r / SQRT2),
    )


def reconstruct(coefficients: Sequence[complex]) -> SpinObservable:
    """Inverse of :func:`decompose`."""
    if len(coefficients) != 4:
        raise ValueError(f"expected 4 ladder coefficients, got {len(coefficients)}")
    c_i, c_p, c_0, c_m = coefficients
    return np.array(
        [[c_i + c_0, SQRT2 * c_p], [SQRT2 * c_m, c_i - c_0]],
        dtype=np.complex128,
    )


def to_ladder_vector(a: ArrayLike) -> NDArray[np.complex128]:
    return np.array(decompose(a), dtype=np.complex128)


def from_ladder_vector(vec: ArrayLike) -> SpinObservable:
    arr = np.asarray(vec, dtype=np.complex128)
    if arr.shape != (4,):
        raise ValueError(f"ladder vector must have 4 entries, got shape {arr.shape}")
    return reconstruct(tuple(complex(c) for c in arr))


def operator_norm(a: ArrayLike) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(a, dtype=np.complex128), 2))


def hermiticity_defect(a: ArrayLike) -> float:
    arr = np.asarray(a, dtype=np.complex128)
    return float(np.max(np.abs(arr - arr.conj().T)))


def is_hermitian(a: ArrayLike, *, atol: float = 1e-12) -> bool:
    return hermiticity_defect(a) <= atol


def expectation(a: ArrayLike, psi: ArrayLike) -> complex:
    """``⟨ψ|A|ψ⟩`` for a spinor ``ψ``."""
    vec = np.asarray(psi, dtype=np.complex128)
    return complex(np.vdot(vec, as_observable(a) @ vec))


def normalized_spinor(psi: ArrayLike, *, atol: float = 1e-12) -> Spinor:
    """Validate that ``psi`` is a unit vector in C².

    Raises:
        ValueError: If ``psi`` has the wrong shape or is not normalized.
    """
    vec = np.array(psi, dtype=np.complex128)
    if vec.shape != (2,):
        raise ValueError(f"spinor must have 2 components, got shape {vec.shape}")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > atol:
        raise ValueError(f"spinor must have unit norm, got {norm:.12g}")
    return vec


NAMED_OBSERVABLES: Final = ("id", "sx", "sy", "sz", "sp", "s0", "sm")
NAMED_STATES: Final = ("up", "down", "plus", "minus", "plus-y")


def named_observable(name: str) -> SpinObservable:
    """Look up an observable by its short CLI name (``sx``, ``sp``, ...)."""
    table = {
        "id": identity,
        "sx": lambda: pauli(1),
        "sy": lambda: pauli(2),
        "sz": lambda: pauli(3),
        "sp": lambda: ladder(1),
        "s0": lambda: ladder(0),
        "sm": lambda: ladder(-1),
    }
    try:
        return table[name]()
    except KeyError:
        raise ValueError(
            f"unknown observable {name!r}; expected one of {', '.join(NAMED_OBSERVABLES)}"
        ) from None


def named_state(name: str) -> Spinor:
    """Standard spinors: σ₃ eigenstates and the σ₁/σ₂ ``+`` eigenstates."""
    inv = 1.0 / SQRT2
    table: dict[str, tuple[complex, complex]] = {
        "up": (1.0, 0.0),
        "down": (0.0, 1.0),
        "plus": (inv, inv),
        "minus": (inv, -inv),
        "plus-y": (inv, 1j * inv),
    }
    try:
        return np.array(table[name], dtype=np.complex128)
    except KeyError:
        raise ValueError(
            f"unknown spin state {name!r}; expected one of {', '.join(NAMED_STATES)}"
        ) from None


def normalize_operator(a: ArrayLike) -> SpinObservable:
    """Rescale ``a`` to unit operator norm."""
    obs = as_observable(a)
    norm = operator_norm(obs)
    if norm == 0.0:
        raise ValueError("cannot normalize the zero operator")
    return obs / norm
