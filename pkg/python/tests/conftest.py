from __future__ import annotations

import numpy as np
import pytest

from qsrelax.gkls import GklsGenerator, build_generator
from qsrelax.photon_kernel import BathKernel, DCoefficients, d_coefficients


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def kernel() -> BathKernel:
    return BathKernel()


@pytest.fixture(scope="session")
def frequency_d(kernel: BathKernel) -> DCoefficients:
    return d_coefficients(kernel)


@pytest.fixture(scope="session")
def generator(frequency_d: DCoefficients) -> GklsGenerator:
    return build_generator(frequency_d)
