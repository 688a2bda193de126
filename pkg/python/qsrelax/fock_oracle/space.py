"""Bosonic Fock space truncated by total excitation number, tensored with C²."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import DimensionBudgetError

Multiset = tuple[int, ...]


class TruncatedSpace:
    """Basis of ``(capped Fock space) ⊗ C²``.

    Photon states are sorted tuples of mode indices, one entry per quantum.
    The flat index of photon state ``p`` with spin ``s`` is ``2p + s``; spin 0
    is up (``σ₃ = +1``).
    """

    def __init__(self, n_modes: int, excitation_cap: int, *, dim_budget: int | None = None) -> None:
        super().__init__()
        if n_modes < 0 or excitation_cap < 0:
            raise ValueError("n_modes and excitation_cap must be nonnegative")
        expected = self.expected_dimension(n_modes, excitation_cap)
        if dim_budget is not None and expected > dim_budget:
            raise DimensionBudgetError(
                f"dimension {expected} for {n_modes} modes at cap {excitation_cap}"
                + f" exceeds the budget {dim_budget}"
            )
        self.n_modes = n_modes
        self.excitation_cap = excitation_cap
        self.states: list[Multiset] = [
            combo
            for n in range(excitation_cap + 1)
            for combo in itertools.combinations_with_replacement(range(n_modes), n)
        ]
        self._index = {state: idx for idx, state in enumerate(self.states)}

    @staticmethod
    def expected_dimension(n_modes: int, excitation_cap: int) -> int:
        """``2 · Σ_{n≤cap} C(M + n - 1, n)``, computed without enumeration."""
        photon = 1 + sum(math.comb(n_modes + n - 1, n) for n in range(1, excitation_cap + 1))
        return 2 * photon

    @property
    def photon_dimension(self) -> int:
        return len(self.states)

    @property
    def dimension(self) -> int:
        return 2 * len(self.states)

    def __len__(self) -> int:
        return self.dimension

    def index_of(self, state: Multiset) -> int:
        """Photon index of a sorted multiset of mode indices.

        Raises:
            KeyError: If the state is not in the truncated basis.
        """
        return self._index[tuple(sorted(state))]

    def index_of_occupations(self, occupations: Sequence[int]) -> int:
        if len(occupations) != self.n_modes:
            raise ValueError(f"expected {self.n_modes} occupation numbers, got {len(occupations)}")
        multiset = tuple(q for q, n in enumerate(occupations) for _ in range(n))
        return self.index_of(multiset)

    def occupations(self, index: int) -> list[int]:
        occ = [0] * self.n_modes
        for q in self.states[index]:
            occ[q] += 1
        return occ

    @staticmethod
    def flat_index(photon: int, spin: int) -> int:
        return 2 * photon + spin

    @staticmethod
    def split(flat: int) -> tuple[int, int]:
        return divmod(flat, 2)

    def photon_number(self, index: int) -> int:
        return len(self.states[index])

    def lowering_entries(self) -> Iterator[tuple[int, int, int, float]]:
        """Nonzero elements of the annihilators.

        Yields ``(target, source, mode, amplitude)`` with
        ``a_mode |source⟩ = amplitude |target⟩``.
        """
        for source, state in enumerate(self.states):
            for q in sorted(set(state)):
                count = state.count(q)
                pos = state.index(q)
                target = self._index[state[:pos] + state[pos + 1 :]]
                yield target, source, q, math.sqrt(count)

    def vacuum_state(self, spinor: ArrayLike) -> NDArray[np.complex128]:
        """``Ψ₀ ⊗ a`` as a flat vector."""
        vec = np.zeros(self.dimension, dtype=np.complex128)
        vec[:2] = np.asarray(spinor, dtype=np.complex128)
        return vec
