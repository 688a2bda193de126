from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.integrate

from qsrelax import photon_kernel as pk
from qsrelax.photon_kernel import BathKernel, CutoffSpec, DCoefficients

from .helpers import RE_D1_DEFAULT

#: ``∫J`` and ``-∫J/ω`` for the default Gaussian cutoff.
SPECTRAL_MASS = 32.0 / (3.0 * math.pi**2)
IM_D0 = -4.0 * math.sqrt(2.0 * math.pi) / (3.0 * math.pi**2)


class TestCutoff:
    def test_gaussian_values(self) -> None:
        spec = CutoffSpec()
        assert pk.chi(spec, 0.0) == 1.0
        assert pk.chi(spec, 4.0) == pytest.approx(math.exp(-1.0))

    def test_notch_vanishes_at_center(self) -> None:
        spec = CutoffSpec(kind="notched_gaussian", notch_center=2.0)
        assert pk.chi(spec, 2.0) == 0.0
        assert pk.chi(spec, 3.0) > 0.0
        assert not pk.fgr_holds(spec, 1.0)
        assert pk.fgr_holds(spec, 1.5)

    def test_invalid_lambda(self) -> None:
        with pytest.raises(ValueError, match="invalid cutoff"):
            _ = CutoffSpec(lam=-1.0)
        with pytest.raises(ValueError, match="invalid cutoff"):
            _ = CutoffSpec(lam=math.nan)

    def test_invalid_kind(self) -> None:
        with pytest.raises(ValueError, match="cutoff kind"):
            _ = CutoffSpec(kind="boxcar")  # pyright: ignore[reportArgumentType]

    def test_negative_radius(self) -> None:
        with pytest.raises(ValueError):
            _ = pk.chi(CutoffSpec(), -0.1)


class TestSpectralDensity:
    def test_closed_form(self, kernel: BathKernel) -> None:
        expected = 8.0 * math.exp(-0.5) / (3.0 * math.pi**2)
        assert pk.spectral_density(kernel, 2.0) == pytest.approx(expected, rel=1e-14)

    def test_array_form_clips_negative(self, kernel: BathKernel) -> None:
        values = pk.spectral_density_array(kernel, [-1.0, 0.0, 2.0])
        assert values[0] == 0.0
        assert values[1] == 0.0
        assert values[2] == pytest.approx(pk.spectral_density(kernel, 2.0))

    def test_radial_density_relation(self, kernel: BathKernel) -> None:
        # J(r) = 4π r² F(r)
        for r in (0.5, 2.0, 7.0):
            assert 4 * math.pi * r * r * pk.radial_density(kernel, r) == pytest.approx(
                pk.spectral_density(kernel, r), rel=1e-13
            )

    def test_spectral_mass(self, kernel: BathKernel) -> None:
        assert pk.spectral_mass(kernel) == pytest.approx(SPECTRAL_MASS, rel=1e-9)


class TestCorrelationKernel:
    def test_value_at_zero(self, kernel: BathKernel) -> None:
        assert pk.u_of_t(kernel, 0.0) == pytest.approx(SPECTRAL_MASS, rel=1e-9)

    def test_conjugate_symmetry(self, kernel: BathKernel) -> None:
        assert pk.u_of_t(kernel, -1.3) == pytest.approx(pk.u_of_t(kernel, 1.3).conjugate())

    def test_grid_matches_adaptive(self, kernel: BathKernel) -> None:
        times = np.array([0.0, 0.4, 1.7, 6.0, 25.0])
        grid = pk.u_on_grid(kernel, times)
        adaptive = np.array([pk.u_of_t(kernel, float(t)) for t in times])
        np.testing.assert_allclose(grid, adaptive, atol=1e-8)

    def test_decay(self, kernel: BathKernel) -> None:
        profile = pk.decay_profile(kernel, np.linspace(0.0, 50.0, 51))
        assert math.isfinite(profile.bound)
        assert abs(pk.u_of_t(kernel, 50.0)) < 1e-4 * abs(pk.u_of_t(kernel, 0.0))


class TestFrequencyCoefficients:
    def test_resonant_rate(self, frequency_d: DCoefficients) -> None:
        assert frequency_d.d1.real == pytest.approx(RE_D1_DEFAULT, rel=1e-12)
        assert frequency_d.d1.real == pytest.approx(0.5148392, abs=1e-7)

    def test_off_resonant_real_parts_vanish(self, frequency_d: DCoefficients) -> None:
        assert frequency_d.d0.real == 0.0
        assert frequency_d.dm1.real == 0.0

    def test_shift_of_zero_mode(self, frequency_d: DCoefficients) -> None:
        assert frequency_d.d0.imag == pytest.approx(IM_D0, rel=1e-8)

    def test_negative_mode_shift_sign(self, frequency_d: DCoefficients) -> None:
        assert frequency_d.dm1.imag < 0
        assert frequency_d.d0.imag < frequency_d.dm1.imag

    def test_bad_index(self, kernel: BathKernel) -> None:
        with pytest.raises(ValueError, match="ladder index"):
            _ = pk.d_coefficient(kernel, 2)

    def test_notched_cutoff_kills_rate(self) -> None:
        spec = CutoffSpec(kind="notched_gaussian", notch_center=2.0, notch_width=0.25)
        d1 = pk.d_coefficient(BathKernel(cutoff=spec), 1)
        assert d1.real == 0.0

    def test_scaling_with_beta(self) -> None:
        kernel = BathKernel(beta=0.5)
        expected = math.pi * pk.spectral_density(kernel, 1.0)
        assert pk.d_coefficient(kernel, 1).real == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("beta", [13.0, 12.0 - 1e-8])
    def test_resonance_at_or_beyond_band_edge(self, beta: float) -> None:
        kernel = BathKernel(beta=beta)
        pole = kernel.resonance
        assert pole > kernel.omega_cut - 1e-7
        d1 = pk.d_coefficient(kernel, 1)
        # J is negligible past 20 for λ = 4, so the shift is a regular integral
        reference, _ = scipy.integrate.quad(
            lambda w: pk.spectral_density(kernel, w) / (pole - w),
            0.0,
            20.0,
            epsabs=1e-13,
            epsrel=1e-11,
        )
        assert d1.imag == pytest.approx(reference, rel=1e-6)
        assert 0.0 <= d1.real < 1e-25

    def test_indexing(self, frequency_d: DCoefficients) -> None:
        assert frequency_d[1] == frequency_d.d1
        assert frequency_d[-1] == frequency_d.dm1
        with pytest.raises(KeyError):
            _ = frequency_d[3]

    def test_from_values_length(self) -> None:
        with pytest.raises(ValueError, match="expected 3"):
            _ = DCoefficients.from_values([1.0, 2.0])


class TestTimeSide:
    def test_agrees_with_frequency_side(
        self, kernel: BathKernel, frequency_d: DCoefficients
    ) -> None:
        time_d = pk.time_side_coefficients(kernel)
        for m in (1, 0, -1):
            scale = max(abs(frequency_d[m]), abs(time_d[m]))
            assert abs(frequency_d[m] - time_d[m]) / scale < 1e-4
        assert set(time_d.diagnostics["residuals"]) == {"1", "0", "-1"}

    def test_rejects_nonpositive_eps(self, kernel: BathKernel) -> None:
        with pytest.raises(ValueError, match="positive"):
            _ = pk.time_side_d(kernel, 1, eps_schedule=(0.1, 0.0))

    def test_neville_recovers_polynomial(self) -> None:
        xs = [0.4, 0.2, 0.1, 0.05]
        ys = [complex(3.0 - 2.0 * x + 0.5 * x**2 - x**3) for x in xs]
        value, residual = pk._neville_at_zero(xs, ys)  # pyright: ignore[reportPrivateUsage]
        assert value == pytest.approx(3.0, abs=1e-12)
        assert residual < 1e-2


class TestFiniteTime:
    def test_zero_at_origin(self, kernel: BathKernel) -> None:
        d = pk.finite_time_coefficients(kernel, 0.0)
        assert d.as_dict() == {1: 0j, 0: 0j, -1: 0j}

    def test_approaches_limit(self, kernel: BathKernel, frequency_d: DCoefficients) -> None:
        d = pk.finite_time_coefficients(kernel, 100.0)
        for m in (1, 0, -1):
            assert abs(d[m] - frequency_d[m]) < 1e-3

    def test_negative_time(self, kernel: BathKernel) -> None:
        with pytest.raises(ValueError):
            _ = pk.finite_time_coefficients(kernel, -1.0)


class TestGeometry:
    def test_surface_rate_equals_resonant_rate(
        self, kernel: BathKernel, frequency_d: DCoefficients
    ) -> None:
        assert pk.surface_rate(kernel) == pytest.approx(frequency_d.d1.real, rel=1e-12)

    def test_radial_reduction(self, kernel: BathKernel) -> None:
        check = pk.radial_reduction_check(kernel)
        assert check.relative_defect < 1e-6
