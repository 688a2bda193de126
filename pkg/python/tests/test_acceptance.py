"""End-to-end checks of the physical claims at the default configuration.

The oracle experiments take minutes and are marked ``slow``; run them with
``poe acceptance``.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from qsrelax import gkls
from qsrelax import photon_kernel as pk
from qsrelax import spin_algebra as sa
from qsrelax.config import RunConfig, build_config
from qsrelax.core import run_oracle_compare, run_sweep
from qsrelax.fock_oracle import (
    PropagationSettings,
    TruncatedSpace,
    build_hamiltonian,
    discretize_bath,
    propagate_vacuum_pair,
)
from qsrelax.output import OutputDirectory
from qsrelax.photon_kernel import BathKernel, DCoefficients
from qsrelax.propagator import MarkovPropagator, fit_relaxation, relaxation_rates

from .helpers import RE_D1_DEFAULT


def test_coefficient_identity(kernel: BathKernel, frequency_d: DCoefficients) -> None:
    assert abs(frequency_d.d1.real - RE_D1_DEFAULT) / RE_D1_DEFAULT < 1e-6
    time_d = pk.time_side_coefficients(kernel)
    assert abs(time_d.d1 - frequency_d.d1) / abs(frequency_d.d1) < 1e-4
    assert abs(frequency_d.d0.real) < 1e-8
    assert abs(frequency_d.dm1.real) < 1e-8


@pytest.mark.slow
def test_kernel_decay(kernel: BathKernel) -> None:
    grid = np.linspace(0.0, 100.0, 1001)
    assert math.isfinite(pk.decay_profile(kernel, grid).bound)
    assert pk.decay_stability(kernel, grid) < 0.01


def test_spectrum(generator: gkls.GklsGenerator) -> None:
    assert gkls.eigen_residual(generator) < 1e-10
    np.testing.assert_allclose(generator.apply(sa.identity()), 0.0, atol=1e-15)
    nonzero = [p for p in gkls.eigensystem(generator) if p.label != "identity"]
    assert all(p.value.real < 0 for p in nonzero)


@pytest.mark.parametrize("tau", [0.1, 1.0, 10.0])
def test_cp_certificates(generator: gkls.GklsGenerator, tau: float) -> None:
    report = gkls.verify_cp(gkls.semigroup(generator, tau))
    assert report.unitality_defect < 1e-12
    assert report.hermiticity_defect < 1e-12
    assert report.min_choi_eigenvalue >= -1e-10


@pytest.mark.slow
def test_free_dynamics_oracle(kernel: BathKernel) -> None:
    disc = discretize_bath(kernel, 16.0, 200)
    space = TruncatedSpace(disc.modes.pool_size, 2)
    h = build_hamiltonian(disc.modes, 1.0, 0.0, space)
    times = np.linspace(0.0, 10.0, 21)
    dynamics = propagate_vacuum_pair(h, times, PropagationSettings(method="krylov"))
    for m in (1, 0, -1):
        reduced = dynamics.reduced(sa.ladder(m))
        for k, t in enumerate(times):
            expected = np.exp(2j * m * t) * sa.ladder(m)
            np.testing.assert_allclose(reduced[k], expected, atol=1e-8)


@pytest.mark.slow
def test_error_scaling(tmp_path: Path) -> None:
    config = build_config({"output.directory": str(tmp_path)})
    report = run_oracle_compare(config, OutputDirectory(tmp_path, ("csv", "json")), threads=4)
    curve = report.curve
    assert report.dimension == 361802
    assert curve.g_values == [0.2, 0.1, 0.05]
    assert curve.baseline.sup_error < 1e-8
    if curve.status == "inconclusive":
        pytest.skip(f"oracle inconclusive: {curve.reason}")
    assert curve.ratio_ok
    assert all(r.secular_ratio < 3.0 for r in curve.runs)
    assert all(r.norm_defect < 1e-9 for r in curve.runs)
    assert (tmp_path / "error_traces.csv").exists()


def test_relaxation_limit(generator: gkls.GklsGenerator) -> None:
    g = 0.1
    propagator = MarkovPropagator(generator, 1.0)
    times = np.linspace(0.0, 2000.0, 2001)
    longitudinal = propagator.bloch_trajectory(sa.named_state("up"), times, g)
    transverse = propagator.bloch_trajectory(sa.named_state("plus"), times, g)
    assert longitudinal.column("sz")[-1] == pytest.approx(-1.0, abs=1e-8)
    fitted = fit_relaxation(longitudinal, transverse)
    expected = relaxation_rates(g, generator.d)
    assert fitted.longitudinal_rate == pytest.approx(expected.longitudinal_rate, rel=0.01)
    assert fitted.transverse_rate == pytest.approx(expected.transverse_rate, rel=0.01)


@pytest.mark.slow
@pytest.mark.parametrize(
    ("axis", "values", "limit"),
    [("n_modes", [100.0, 200.0], 0.10), ("excitation_cap", [1.0, 2.0], 0.20)],
)
def test_discretization_convergence(
    tmp_path: Path, axis: str, values: list[float], limit: float
) -> None:
    config = RunConfig()
    out = OutputDirectory(tmp_path, ("json",))
    report = run_sweep(config, out, axis, values, oracle=True, threads=2)
    coarse, fine = (r.sup_error for r in report.rows)
    assert coarse is not None
    assert fine is not None
    assert abs(coarse - fine) / fine < limit
