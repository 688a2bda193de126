from __future__ import annotations

import math

import numpy as np
import pytest

from qsrelax import gkls
from qsrelax import spin_algebra as sa
from qsrelax.errors import HermiticityError
from qsrelax.gkls import GklsGenerator, build_generator
from qsrelax.photon_kernel import DCoefficients
from qsrelax.propagator import (
    MarkovPropagator,
    Trajectory,
    approx_heisenberg,
    equilibrium_distance,
    evolve_density,
    fit_relaxation,
    relaxation_rates,
)
from qsrelax.spin_algebra import ExternalField

from .helpers import bloch_vector, random_observable, random_state


@pytest.fixture
def propagator(generator: GklsGenerator) -> MarkovPropagator:
    return MarkovPropagator(generator, beta=1.0)


class TestApproximation:
    def test_initial_value(self, propagator: MarkovPropagator, rng: np.random.Generator) -> None:
        a = random_observable(rng)
        np.testing.assert_allclose(propagator.approx_heisenberg(0.0, 0.3, a), a, atol=1e-15)

    def test_zero_coupling_is_free_evolution(
        self, propagator: MarkovPropagator, rng: np.random.Generator
    ) -> None:
        a = random_observable(rng)
        expected = sa.free_evolve(3.7, ExternalField.along_z(1.0), a)
        np.testing.assert_allclose(propagator.approx_heisenberg(3.7, 0.0, a), expected, atol=1e-13)

    def test_ladder_eigen_evolution(self, propagator: MarkovPropagator) -> None:
        d = propagator.generator.d
        g, t = 0.2, 5.0
        rate = complex(-d.d1.real, d.frequency_shift)
        expected = np.exp(g * g * t * rate + 2j * t) * sa.ladder(1)
        np.testing.assert_allclose(
            propagator.approx_heisenberg(t, g, sa.ladder(1)), expected, atol=1e-13
        )

    def test_free_rotation_commutes_with_semigroup(self, propagator: MarkovPropagator) -> None:
        g, t = 0.3, 2.0
        damped = gkls.semigroup(propagator.generator, t * g * g).matrix4
        free = sa.free_evolution_superoperator(t, 1.0)
        full = propagator.superoperator(t, g)
        np.testing.assert_allclose(full, damped @ free, atol=1e-13)
        np.testing.assert_allclose(full, free @ damped, atol=1e-13)

    def test_module_level_helpers(self, generator: GklsGenerator) -> None:
        out = approx_heisenberg(1.0, 0.2, sa.pauli(3), generator, 1.0)
        assert sa.is_hermitian(out, atol=1e-13)
        rho = evolve_density(np.diag([1.0, 0.0]), 1.0, 0.2, generator, 1.0)
        assert np.trace(rho) == pytest.approx(1.0)

    def test_rejects_negative_arguments(self, propagator: MarkovPropagator) -> None:
        with pytest.raises(ValueError):
            _ = propagator.superoperator(-1.0, 0.1)
        with pytest.raises(ValueError):
            _ = propagator.superoperator(1.0, -0.1)
        with pytest.raises(ValueError, match="beta"):
            _ = MarkovPropagator(propagator.generator, beta=0.0)


class TestStates:
    def test_density_stays_physical(
        self, propagator: MarkovPropagator, rng: np.random.Generator
    ) -> None:
        rho0 = random_state(rng)
        for t in (0.5, 5.0, 50.0):
            rho = propagator.evolve_density(rho0, t, 0.3)
            assert np.trace(rho) == pytest.approx(1.0, abs=1e-13)
            assert sa.is_hermitian(rho, atol=1e-13)
            assert np.min(np.linalg.eigvalsh(rho)) >= -1e-12

    def test_density_and_heisenberg_agree(
        self, propagator: MarkovPropagator, rng: np.random.Generator
    ) -> None:
        rho0 = random_state(rng)
        rho = propagator.evolve_density(rho0, 4.0, 0.25)
        heisenberg = propagator.approx_heisenberg(4.0, 0.25, sa.pauli(2))
        assert np.trace(rho @ sa.pauli(2)) == pytest.approx(np.trace(rho0 @ heisenberg))

    def test_bloch_matches_density(
        self, propagator: MarkovPropagator, rng: np.random.Generator
    ) -> None:
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi /= np.linalg.norm(psi)
        trajectory = propagator.bloch_trajectory(psi, [0.0, 3.0], 0.4)
        rho = propagator.evolve_density(np.outer(psi, psi.conj()), 3.0, 0.4)
        np.testing.assert_allclose(trajectory.values[1], bloch_vector(rho), atol=1e-12)


class TestTrajectories:
    def test_larmor_circle_without_coupling(self, propagator: MarkovPropagator) -> None:
        times = np.linspace(0.0, 2.0 * math.pi, 41)
        trajectory = propagator.bloch_trajectory(sa.named_state("plus"), times, 0.0)
        sx, sy, sz = (trajectory.column(c) for c in ("sx", "sy", "sz"))
        np.testing.assert_allclose(sx, np.cos(2.0 * times), atol=1e-13)
        np.testing.assert_allclose(sy, np.sin(2.0 * times), atol=1e-13)
        np.testing.assert_allclose(sz, 0.0, atol=1e-13)

    def test_longitudinal_relaxation_is_monotone(self, propagator: MarkovPropagator) -> None:
        times = np.linspace(0.0, 400.0, 201)
        sz = propagator.bloch_trajectory(sa.named_state("up"), times, 0.1).column("sz")
        assert sz[0] == pytest.approx(1.0)
        assert np.all(np.diff(sz) <= 1e-14)
        assert sz[-1] > -1.0

    def test_equilibrium_distance_nonincreasing(
        self, propagator: MarkovPropagator, rng: np.random.Generator
    ) -> None:
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi /= np.linalg.norm(psi)
        trajectory = propagator.bloch_trajectory(psi, np.linspace(0.0, 300.0, 301), 0.2)
        distance = equilibrium_distance(trajectory)
        assert np.all(np.diff(distance) <= 1e-12)

    def test_ladder_trajectory_columns(self, propagator: MarkovPropagator) -> None:
        trajectory = propagator.ladder_trajectory(sa.pauli(3), [0.0, 1.0, 2.0], 0.1)
        assert trajectory.columns == ("re_cI", "re_cp", "im_cp", "re_c0", "re_cm", "im_cm")
        assert trajectory.rows().shape == (3, 6)
        assert trajectory.column("re_c0")[0] == pytest.approx(1.0)

    def test_rejects_unsorted_times(self) -> None:
        with pytest.raises(ValueError, match="strictly increasing"):
            _ = Trajectory(
                times=np.array([0.0, 2.0, 1.0]), values=np.zeros((3, 3)), kind="bloch", g=0.1
            )

    def test_rejects_non_unit_spinor(self, propagator: MarkovPropagator) -> None:
        with pytest.raises(ValueError):
            _ = propagator.bloch_trajectory([1.0, 1.0], [0.0, 1.0], 0.1)

    def test_non_hermitian_generator_is_caught(self) -> None:
        broken = build_generator(DCoefficients.from_values([0.5, 0.0, 0.0]))
        matrix = broken.matrix4.copy()
        matrix[0, 2] += 0.5j
        corrupted = GklsGenerator(matrix4=matrix, d=broken.d, h_l=broken.h_l)
        with pytest.raises(HermiticityError):
            _ = MarkovPropagator(corrupted, 1.0).bloch_trajectory(
                sa.named_state("up"), [0.0, 1.0], 1.0
            )


class TestRates:
    def test_closed_form_rates(self, propagator: MarkovPropagator) -> None:
        d = propagator.generator.d
        rates = relaxation_rates(0.1, d)
        assert rates.longitudinal_rate == pytest.approx(2.0 * 0.01 * d.d1.real)
        assert rates.transverse_rate == pytest.approx(0.01 * d.d1.real)
        assert rates.t1 == pytest.approx(rates.t2 / 2.0)

    def test_fitted_rates_match(self, propagator: MarkovPropagator) -> None:
        g = 0.1
        times = np.linspace(0.0, 300.0, 301)
        longitudinal = propagator.bloch_trajectory(sa.named_state("up"), times, g)
        transverse = propagator.bloch_trajectory(sa.named_state("plus"), times, g)
        fitted = fit_relaxation(longitudinal, transverse)
        expected = relaxation_rates(g, propagator.generator.d)
        assert fitted.longitudinal_rate == pytest.approx(expected.longitudinal_rate, rel=0.01)
        assert fitted.transverse_rate == pytest.approx(expected.transverse_rate, rel=0.01)

    def test_zero_rate_gives_infinite_times(self) -> None:
        rates = relaxation_rates(0.1, DCoefficients.from_values([0.2j, 0.0, 0.0]))
        assert math.isinf(rates.t1)
        assert math.isinf(rates.t2)

    def test_rejects_nonpositive_coupling(self, propagator: MarkovPropagator) -> None:
        with pytest.raises(ValueError, match="positive"):
            _ = relaxation_rates(0.0, propagator.generator.d)
