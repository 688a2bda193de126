"""Photon bath kernel: cutoff, spectral density, correlation kernel and d_m.

The vacuum correlation of the magnetic field at the spin position reduces to a
one-dimensional Fourier integral

    u(t) = ∫₀^∞ J(ω) e^{-iωt} dω,    J(ω) = ω³ χ(ω)² / (3π²),

and the relaxation coefficients are its Abel-regularised half-line transforms
``d_m = lim_{ε→0⁺} ∫₀^∞ u(t) e^{2imβt - εt} dt``. They are computed on the
frequency side (delta term plus principal value). The time side is kept as an
independent check.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import Any, Final, Literal

import numpy as np
import scipy.integrate
from numpy.typing import ArrayLike, NDArray

from .errors import ExtrapolationError, PrincipalValueError, QuadratureError

logger = logging.getLogger(__name__)

CutoffKind = Literal["gaussian", "notched_gaussian"]
CUTOFF_KINDS: Final[tuple[CutoffKind, ...]] = ("gaussian", "notched_gaussian")

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

_GL_ORDER: Final = 16
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


@dataclass(frozen=True, slots=True)
class CutoffSpec:
    """Smooth ultraviolet cutoff χ.

    ``gaussian`` is ``exp(-(r/λ)²)``. ``notched_gaussian`` multiplies it by
    ``1 - exp(-((r - r₀)/w)²)``, which stays smooth and rapidly decaying but
    vanishes at ``r₀``.
    """

    kind: CutoffKind = "gaussian"
    lam: float = 4.0
    notch_center: float = 2.0
    notch_width: float = 0.25

    def __post_init__(self) -> None:
        if self.kind not in CUTOFF_KINDS:
            raise ValueError(f"invalid cutoff kind {self.kind!r}")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"invalid cutoff: lambda must be positive, got {self.lam}")
        if self.kind == "notched_gaussian" and not (
            self.notch_width > 0 and self.notch_center >= 0
        ):
            raise ValueError("invalid cutoff: notch needs width > 0 and center >= 0")


@dataclass(frozen=True, slots=True)
class QuadratureSettings:
    """Tolerances and node budgets shared by every integral in this module."""

    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    limit: int = 200
    #: Frequency integrals run on ``[0, omega_cut_factor * λ]``.
    omega_cut_factor: float = 6.0
    pv_initial_radius: float = 0.5
    pv_min_radius: float = 1e-6
    pv_tol: float = 1e-9
    eps_schedule: tuple[float, ...] = (0.08, 0.04, 0.02, 0.01)
    time_horizon: float = 200.0
    time_panel: float = 0.5
    extrapolation_tol: float = 1e-5

    def tightened(self, factor: float = 10.0) -> QuadratureSettings:
        return replace(self, abs_tol=self.abs_tol / factor, rel_tol=self.rel_tol / factor)


@dataclass(frozen=True, slots=True)
class BathKernel:
    """Cutoff plus Larmor scale; everything the coefficients depend on."""

    cutoff: CutoffSpec = field(default_factory=CutoffSpec)
    beta: float = 1.0
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be positive, got {self.beta}")

    @property
    def omega_cut(self) -> float:
        return self.quadrature.omega_cut_factor * self.cutoff.lam

    @property
    def resonance(self) -> float:
        """The frequency ``2β`` probed by ``d₁``."""
        return 2.0 * self.beta


@dataclass(frozen=True, slots=True)
class DCoefficients:
    """The three coefficients d₁, d₀, d₋₁ plus how they were obtained."""

    d1: complex
    d0: complex
    dm1: complex
    method: str = "frequency"
    diagnostics: Mapping[str, Any] = field(default_factory=dict)

    def __getitem__(self, m: int) -> complex:
        if m == 1:
            return self.d1
        if m == 0:
            return self.d0
        if m == -1:
            return self.dm1
        raise KeyError(m)

    def as_dict(self) -> dict[int, complex]:
        return {1: self.d1, 0: self.d0, -1: self.dm1}

    @classmethod
    def from_values(cls, values: Sequence[complex], method: str = "synthetic") -> DCoefficients:
        """Build from ``(d₁, d₀, d₋₁)``."""
        if len(values) != 3:
            raise ValueError(f"expected 3 coefficients (d1, d0, d-1), got {len(values)}")
        d1, d0, dm1 = (complex(v) for v in values)
        return cls(d1=d1, d0=d0, dm1=dm1, method=method)

    @property
    def frequency_shift(self) -> float:
        """``Im d₁ - Im d₋₁``, the shift of the Larmor frequency per unit g²."""
        return self.d1.imag - self.dm1.imag


@dataclass(frozen=True, slots=True)
class TimeSideResult:
    """Abel limit of one half-line transform, with the data behind it."""

    m: int
    value: complex
    eps: tuple[float, ...]
    samples: tuple[complex, ...]
    residual: float


def chi(spec: CutoffSpec, r: float) -> float:
    """Evaluate the cutoff χ at radius ``r``.

    Raises:
        ValueError: If ``r`` is negative.
    """
    if r < 0:
        raise ValueError(f"cutoff radius must be nonnegative, got {r}")
    return float(_chi_array(spec, np.asarray(r, dtype=np.float64)))


def _chi_array(spec: CutoffSpec, r: FloatArray) -> FloatArray:
    out = np.exp(-((r / spec.lam) ** 2))
    if spec.kind == "notched_gaussian":
        out = out * -np.expm1(-(((r - spec.notch_center) / spec.notch_width) ** 2))
    return out


def fgr_holds(spec: CutoffSpec, beta: float) -> bool:
    """The golden-rule hypothesis ``χ(2β) > 0``."""
    return chi(spec, 2.0 * beta) > 0.0


def radial_density(kernel: BathKernel, k: float) -> float:
    """``F(k) = (2/3) χ(|k|)² |k| / (2π)³``, as a function of ``|k|``."""
    if k < 0:
        raise ValueError(f"|k| must be nonnegative, got {k}")
    return (2.0 / 3.0) * chi(kernel.cutoff, k) ** 2 * k / (2.0 * math.pi) ** 3


def spectral_density(kernel: BathKernel, omega: float) -> float:
    """``J(ω) = ω³ χ(ω)² / (3π²)``.

    Raises:
        ValueError: If ``omega`` is negative.
    """
    if omega < 0:
        raise ValueError(f"frequency must be nonnegative, got {omega}")
    return float(spectral_density_array(kernel, np.asarray(omega, dtype=np.float64)))


def spectral_density_array(kernel: BathKernel, omega: ArrayLike) -> FloatArray:
    """Vectorised ``J``; negative frequencies map to 0."""
    w = np.asarray(omega, dtype=np.float64)
    wp = np.clip(w, 0.0, None)
    return wp**3 * _chi_array(kernel.cutoff, wp) ** 2 / (3.0 * math.pi**2)


def _quad(
    func: Callable[[float], float],
    a: float,
    b: float,
    settings: QuadratureSettings,
    what: str,
    **kwargs: Any,
) -> float:
    result = scipy.integrate.quad(
        func,
        a,
        b,
        epsabs=settings.abs_tol,
        epsrel=settings.rel_tol,
        limit=settings.limit,
        full_output=1,
        **kwargs,
    )
    if len(result) >= 4:
        raise QuadratureError(f"{what} did not converge on [{a:g}, {b:g}]: {result[3]}")
    value, abserr, info = result[0], result[1], result[2]
    logger.debug(
        "%s on [%g, %g]: %.15g (abserr %.2e, neval %s)",
        what,
        a,
        b,
        value,
        abserr,
        info.get("neval", "?"),
    )
    return float(value)


def _density(kernel: BathKernel) -> Callable[[float], float]:
    def j(w: float) -> float:
        return float(spectral_density_array(kernel, w))

    return j


def spectral_mass(kernel: BathKernel, lower: float = 0.0) -> float:
    """``∫_lower^∞ J(ω) dω``; with ``lower = 0`` this is ``u(0)``."""
    return _quad(_density(kernel), lower, np.inf, kernel.quadrature, "spectral mass")


def u_of_t(kernel: BathKernel, t: float) -> complex:
    """Correlation kernel ``u(t)`` by oscillatory quadrature.

    Uses QUADPACK's Fourier-weighted rules on ``[0, ω_cut]``.

    Raises:
        QuadratureError: If either quadrature misses its tolerance.
    """
    settings = kernel.quadrature
    j = _density(kernel)
    wc = kernel.omega_cut
    if t == 0:
        return complex(_quad(j, 0.0, wc, settings, "u(0)"), 0.0)
    freq = abs(t)
    re = _quad(j, 0.0, wc, settings, "Re u(t)", weight="cos", wvar=freq)
    im = -_quad(j, 0.0, wc, settings, "Im u(t)", weight="sin", wvar=freq)
    return complex(re, im if t > 0 else -im)


def _composite_gauss_legendre(a: float, b: float, panel: float) -> tuple[FloatArray, FloatArray]:
    n_panels = max(1, math.ceil((b - a) / panel))
    edges = np.linspace(a, b, n_panels + 1)
    half = np.diff(edges)[:, None] / 2.0
    mid = (edges[:-1] + edges[1:])[:, None] / 2.0
    nodes = (mid + half * _GL_NODES[None, :]).ravel()
    weights = (half * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def u_on_grid(kernel: BathKernel, times: ArrayLike, *, chunk: int = 2_000_000) -> ComplexArray:
    """``u`` on a whole time grid with one composite Gauss-Legendre rule in ω.

    The ω panels are narrow enough that ``e^{-iωt}`` turns by at most 8 rad
    per panel for the largest ``|t|`` requested.
    """
    t = np.asarray(times, dtype=np.float64)
    flat = t.ravel()
    t_max = float(np.max(np.abs(flat))) if flat.size else 0.0
    panel = min(0.5, 8.0 / t_max) if t_max > 0 else 0.5
    nodes, weights = _composite_gauss_legendre(0.0, kernel.omega_cut, panel)
    wj = weights * spectral_density_array(kernel, nodes)
    out = np.empty(flat.shape, dtype=np.complex128)
    step = max(1, chunk // nodes.size)
    for start in range(0, flat.size, step):
        block = flat[start : start + step]
        out[start : start + step] = np.exp(-1j * np.outer(block, nodes)) @ wj
    logger.debug("u_on_grid: %d times x %d frequency nodes", flat.size, nodes.size)
    return out.reshape(t.shape)


@dataclass(frozen=True, slots=True)
class DecayProfile:
    """``|u(t)|(1 + t³)`` sampled on a grid."""

    times: FloatArray
    weighted: FloatArray

    @property
    def bound(self) -> float:
        return float(np.max(self.weighted))


def decay_profile(kernel: BathKernel, times: ArrayLike) -> DecayProfile:
    """Sample ``|u(t)|(1+t³)`` with the adaptive quadrature of :func:`u_of_t`."""
    t = np.asarray(times, dtype=np.float64)
    values = np.array([abs(u_of_t(kernel, float(s))) for s in t])
    return DecayProfile(times=t, weighted=values * (1.0 + np.abs(t) ** 3))


def decay_stability(kernel: BathKernel, times: ArrayLike, factor: float = 10.0) -> float:
    """Relative change of the decay bound when quadrature tolerances shrink by ``factor``."""
    base = decay_profile(kernel, times).bound
    tight = replace(kernel, quadrature=kernel.quadrature.tightened(factor))
    refined = decay_profile(tight, times).bound
    return abs(refined - base) / refined


def _principal_value(kernel: BathKernel, pole: float) -> float:
    """``P.V. ∫₀^∞ J(ω)/(pole - ω) dω`` for a pole at any positive frequency.

    The excision window ``[pole - δ, pole + δ]`` is integrated with the Cauchy
    weight; the outside is regular. δ is halved until two totals agree. The band
    is widened past ``ω_cut`` when the pole sits at or beyond its upper edge.
    """
    settings = kernel.quadrature
    j = _density(kernel)
    wc = max(kernel.omega_cut, pole + 2.0 * settings.pv_initial_radius)

    def outer(w: float) -> float:
        return j(w) / (pole - w)

    def total(delta: float) -> float:
        left = _quad(outer, 0.0, pole - delta, settings, "PV left")
        right = _quad(outer, pole + delta, wc, settings, "PV right")
        # quad's cauchy weight is 1/(w - pole)
        inner = -_quad(
            j, pole - delta, pole + delta, settings, "PV window", weight="cauchy", wvar=pole
        )
        return left + inner + right

    delta = min(settings.pv_initial_radius, pole / 2.0, (wc - pole) / 2.0)
    previous = total(delta)
    if delta / 2.0 < settings.pv_min_radius:
        logger.debug("principal value at %g taken with radius %g", pole, delta)
        return previous
    while delta / 2.0 >= settings.pv_min_radius:
        delta /= 2.0
        current = total(delta)
        if abs(current - previous) <= settings.pv_tol * max(1.0, abs(current)):
            logger.debug("principal value at %g stable with radius %g", pole, delta)
            return current
        previous = current
    raise PrincipalValueError(
        f"principal value at omega={pole:g} not stable down to radius {settings.pv_min_radius:g}"
    )


def _check_index(m: int) -> None:
    if m not in (1, 0, -1):
        raise ValueError(f"ladder index must be 1, 0 or -1, got {m!r}")


def d_coefficient(kernel: BathKernel, m: int) -> complex:
    """Frequency-side ``d_m``.

    ``Re d_m = π J(2mβ)``, which vanishes for ``m ∈ {0, -1}``, and
    ``Im d_m = P.V. ∫₀^∞ J(ω)/(2mβ - ω) dω``.

    Raises:
        ValueError: If ``m`` is not a ladder index.
        QuadratureError: If any of the underlying integrals fails.
    """
    _check_index(m)
    settings = kernel.quadrature
    j = _density(kernel)
    pole = 2.0 * m * kernel.beta
    if m == 1:
        re = math.pi * spectral_density(kernel, pole)
        im = _principal_value(kernel, pole)
    else:
        re = 0.0
        im = _quad(lambda w: j(w) / (pole - w), 0.0, kernel.omega_cut, settings, f"Im d({m})")
    return complex(re, im)


def d_coefficients(kernel: BathKernel) -> DCoefficients:
    """All three frequency-side coefficients."""
    return DCoefficients(
        d1=d_coefficient(kernel, 1),
        d0=d_coefficient(kernel, 0),
        dm1=d_coefficient(kernel, -1),
        method="frequency",
        diagnostics={
            "abs_tol": kernel.quadrature.abs_tol,
            "omega_cut": kernel.omega_cut,
            "pv_tol": kernel.quadrature.pv_tol,
        },
    )


def _neville_at_zero(xs: Sequence[float], ys: Sequence[complex]) -> tuple[complex, float]:
    """Polynomial extrapolation to ``x = 0``.

    Returns the highest-order value and its distance to the best lower-order
    value built from the smallest ``x``.
    """
    n = len(xs)
    if n < 2:
        raise ValueError("extrapolation needs at least two samples")
    table = [complex(y) for y in ys]
    lower = table[-1]
    for k in range(1, n):
        for i in range(n - k):
            x_lo, x_hi = xs[i], xs[i + k]
            table[i] = (x_hi * table[i] - x_lo * table[i + 1]) / (x_hi - x_lo)
        if k == n - 2:
            lower = table[1]
    return table[0], abs(table[0] - lower)


def _abel_samples(
    kernel: BathKernel, m: int, eps: Sequence[float], nodes: FloatArray, weighted_u: ComplexArray
) -> list[complex]:
    phase = weighted_u * np.exp(2j * m * kernel.beta * nodes)
    return [complex(np.sum(phase * np.exp(-e * nodes))) for e in eps]


def _time_nodes(kernel: BathKernel) -> tuple[FloatArray, ComplexArray]:
    settings = kernel.quadrature
    nodes, weights = _composite_gauss_legendre(0.0, settings.time_horizon, settings.time_panel)
    return nodes, weights * u_on_grid(kernel, nodes)


def time_side_d(
    kernel: BathKernel, m: int, eps_schedule: Sequence[float] | None = None
) -> TimeSideResult:
    """Abel limit of ``∫₀^∞ u(t) e^{2imβt - εt} dt`` by Richardson extrapolation in ε.

    Raises:
        ExtrapolationError: If the last two extrapolants differ by more than
            ``extrapolation_tol``.
    """
    _check_index(m)
    return _time_side(kernel, m, eps_schedule, *_time_nodes(kernel))


def _time_side(
    kernel: BathKernel,
    m: int,
    eps_schedule: Sequence[float] | None,
    nodes: FloatArray,
    weighted_u: ComplexArray,
) -> TimeSideResult:
    eps = tuple(eps_schedule or kernel.quadrature.eps_schedule)
    if any(e <= 0 for e in eps):
        raise ValueError("epsilon schedule must be positive")
    samples = _abel_samples(kernel, m, eps, nodes, weighted_u)
    value, residual = _neville_at_zero(eps, samples)
    logger.debug("time-side d(%d) = %s, residual %.2e", m, value, residual)
    if residual > kernel.quadrature.extrapolation_tol:
        raise ExtrapolationError(
            f"Abel limit for d({m}) has residual {residual:.3e}", residual=residual
        )
    return TimeSideResult(m=m, value=value, eps=eps, samples=tuple(samples), residual=residual)


def time_side_coefficients(
    kernel: BathKernel, eps_schedule: Sequence[float] | None = None
) -> DCoefficients:
    """All three time-side coefficients, sharing one evaluation of u on the time nodes."""
    nodes, weighted_u = _time_nodes(kernel)
    results = {m: _time_side(kernel, m, eps_schedule, nodes, weighted_u) for m in (1, 0, -1)}
    return DCoefficients(
        d1=results[1].value,
        d0=results[0].value,
        dm1=results[-1].value,
        method="time",
        diagnostics={
            "eps_schedule": list(results[1].eps),
            "residuals": {str(m): r.residual for m, r in results.items()},
            "time_horizon": kernel.quadrature.time_horizon,
        },
    )


def finite_time_coefficients(kernel: BathKernel, t: float) -> DCoefficients:
    """Truncated transforms ``d_m(t) = ∫₀^t u(s) e^{2imβs} ds``."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if t == 0:
        return DCoefficients(0j, 0j, 0j, method="finite-time", diagnostics={"t": 0.0})
    nodes, weights = _composite_gauss_legendre(0.0, t, kernel.quadrature.time_panel)
    weighted_u = weights * u_on_grid(kernel, nodes)
    values = [
        complex(np.sum(weighted_u * np.exp(2j * m * kernel.beta * nodes))) for m in (1, 0, -1)
    ]
    return DCoefficients.from_values(values, method="finite-time")


def surface_rate(kernel: BathKernel) -> float:
    """``π ∫_{|k|=2β} F dμ`` with the unnormalised sphere measure."""
    r = kernel.resonance
    return math.pi * 4.0 * math.pi * r**2 * radial_density(kernel, r)


@dataclass(frozen=True, slots=True)
class RadialReduction:
    radial: float
    cartesian: float

    @property
    def relative_defect(self) -> float:
        return abs(self.radial - self.cartesian) / abs(self.radial)


def radial_reduction_check(kernel: BathKernel) -> RadialReduction:
    """Compare ``∫J`` with a three-dimensional quadrature of ``∫F(k) dk``.

    The 3-D integral runs over spherical coordinates with independent
    radial, polar and azimuthal quadratures.
    """
    settings = kernel.quadrature
    radial = spectral_mass(kernel)
    rc = kernel.omega_cut

    def integrand(r: float, theta: float, _phi: float) -> float:
        return radial_density(kernel, r) * r * r * math.sin(theta)

    cartesian, err = scipy.integrate.tplquad(
        integrand,
        0.0,
        2.0 * math.pi,
        0.0,
        math.pi,
        0.0,
        rc,
        epsabs=settings.abs_tol,
        epsrel=1e-8,
    )
    logger.debug("radial reduction: %.12g vs 3-D %.12g (err %.1e)", radial, cartesian, err)
    return RadialReduction(radial=radial, cartesian=float(cartesian))
