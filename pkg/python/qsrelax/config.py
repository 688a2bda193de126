"""Run configuration: defaults, flat dotted TOML files, ``QSR_`` environment overrides."""

from __future__ import annotations

import dataclasses
import logging
import math
import os
import sys
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Final, cast

import numpy as np
from numpy.typing import NDArray

from . import spin_algebra as sa
from .errors import ConfigError
from .fock_oracle import (
    PROPAGATOR_CHOICES,
    QUADRATURE_RULES,
    KrylovSettings,
    OracleSettings,
    PropagationSettings,
)
from .photon_kernel import BathKernel, CutoffSpec, QuadratureSettings, fgr_holds

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

logger = logging.getLogger(__name__)

ENV_PREFIX: Final = "QSR_"
OUTPUT_FORMATS: Final = ("csv", "json", "svg")

#: Config keys whose attribute name differs from the dotted key.
_KEY_ALIASES: Final = {"cutoff.lambda": ("cutoff", "lam")}


@dataclass(frozen=True, slots=True)
class CutoffConfig:
    kind: str = "gaussian"
    lam: float = 4.0
    notch_center: float = 2.0
    notch_width: float = 0.25


@dataclass(frozen=True, slots=True)
class TimesConfig:
    t_max: float = 20.0
    n_points: int = 201


@dataclass(frozen=True, slots=True)
class BathConfig:
    #: Upper end of the sampled band; ``None`` means ``4 · cutoff.lambda``.
    omega_max: float | None = None
    n_modes: int = 200
    rule: str = "midpoint"


@dataclass(frozen=True, slots=True)
class OracleConfig:
    excitation_cap: int = 2
    dim_budget: int = 500_000
    propagator: str = "auto"
    dense_threshold: int = 2000
    krylov_dim: int = 24
    recurrence_fraction: float = 0.5
    n_points: int = 101
    normalize_sigma: bool = False


@dataclass(frozen=True, slots=True)
class ToleranceConfig:
    quad_abs: float = 1e-9
    quad_rel: float = 1e-9
    pv: float = 1e-9
    extrapolation: float = 1e-5
    krylov: float = 1e-11
    eigen: float = 1e-10
    cp: float = 1e-10
    tail: float = 1e-10


@dataclass(frozen=True, slots=True)
class OutputConfig:
    directory: str = "qsrelax-out"
    formats: tuple[str, ...] = OUTPUT_FORMATS
    checkpoints: bool = False


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Fully resolved configuration of one run."""

    beta: float = 1.0
    g: float = 0.1
    g_list: tuple[float, ...] = (0.2, 0.1, 0.05)
    sigma: str = "sz"
    seed: int = 0
    cutoff: CutoffConfig = field(default_factory=CutoffConfig)
    times: TimesConfig = field(default_factory=TimesConfig)
    bath: BathConfig = field(default_factory=BathConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def cutoff_spec(self) -> CutoffSpec:
        c = self.cutoff
        return CutoffSpec(
            kind=c.kind,  # pyright: ignore[reportArgumentType]
            lam=c.lam,
            notch_center=c.notch_center,
            notch_width=c.notch_width,
        )

    def kernel(self) -> BathKernel:
        tol = self.tolerances
        quadrature = QuadratureSettings(
            abs_tol=tol.quad_abs,
            rel_tol=tol.quad_rel,
            pv_tol=tol.pv,
            extrapolation_tol=tol.extrapolation,
        )
        return BathKernel(cutoff=self.cutoff_spec(), beta=self.beta, quadrature=quadrature)

    @property
    def omega_max(self) -> float:
        return self.bath.omega_max if self.bath.omega_max is not None else 4.0 * self.cutoff.lam

    def time_grid(self) -> NDArray[np.float64]:
        return np.linspace(0.0, self.times.t_max, self.times.n_points)

    def observable(self) -> sa.SpinObservable:
        sigma = sa.named_observable(self.sigma)
        return sa.normalize_operator(sigma) if self.oracle.normalize_sigma else sigma

    def oracle_settings(self) -> OracleSettings:
        o = self.oracle
        propagation = PropagationSettings(
            method=o.propagator,  # pyright: ignore[reportArgumentType]
            dense_threshold=o.dense_threshold,
            krylov=KrylovSettings(krylov_dim=o.krylov_dim, tol=self.tolerances.krylov),
        )
        return OracleSettings(
            excitation_cap=o.excitation_cap, dim_budget=o.dim_budget, propagation=propagation
        )

    def to_dict(self) -> dict[str, Any]:
        """Flat mapping of dotted keys to resolved values, the same shape as a config file."""
        return {key: _plain(value) for key, value in _flatten(self).items()}


def _plain(value: object) -> object:
    if isinstance(value, tuple):
        return list(cast("tuple[object, ...]", value))
    return value


def _dotted(section: str, attr: str) -> str:
    for key, target in _KEY_ALIASES.items():
        if target == (section, attr):
            return key
    return f"{section}.{attr}" if section else attr


def _flatten(config: RunConfig) -> dict[str, object]:
    out: dict[str, object] = {}
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if dataclasses.is_dataclass(value):
            for sub in dataclasses.fields(value):
                out[_dotted(f.name, sub.name)] = getattr(value, sub.name)
        else:
            out[f.name] = value
    return dict(sorted(out.items()))


def _locate(key: str) -> tuple[str, str]:
    """Section and attribute for a dotted key; section is '' for top-level keys."""
    if key in _KEY_ALIASES:
        return _KEY_ALIASES[key]
    section, _, attr = key.rpartition(".")
    return section, attr


_DEFAULTS: Final = _flatten(RunConfig())
#: Keys whose default is ``None`` but which hold a float when set.
_OPTIONAL_FLOATS: Final = frozenset({"bath.omega_max"})


def known_keys() -> list[str]:
    return list(_DEFAULTS)


def _coerce(key: str, value: object) -> object:
    """Convert a TOML, environment or CLI value to the type of the field's default."""
    default = _DEFAULTS[key]
    try:
        if key in _OPTIONAL_FLOATS or isinstance(default, float):
            return _as_float(value)
        if isinstance(default, bool):
            return _as_bool(value)
        if isinstance(default, int):
            return _as_int(value)
        if isinstance(default, tuple):
            items = value.split(",") if isinstance(value, str) else value
            if not isinstance(items, (list, tuple)):
                raise TypeError("expected a list")
            numeric = isinstance(cast("tuple[object, ...]", default)[0], float)
            entries = [v for v in cast("list[object]", list(items)) if str(v).strip()]
            return tuple(_as_float(v) if numeric else str(v).strip() for v in entries)
        if not isinstance(value, str):
            raise TypeError("expected a string")
        return value
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: cannot use {value!r} ({exc})") from exc


def _as_float(value: object) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise TypeError("expected a number")
    return float(value)


def _as_int(value: object) -> int:
    if isinstance(value, bool):
        raise TypeError("expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        return int(value.strip())
    raise TypeError("expected an integer")


def _as_bool(value: object) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in {"1", "true", "yes", "on"}:
        return True
    if isinstance(value, str) and value.strip().lower() in {"0", "false", "no", "off"}:
        return False
    raise TypeError("expected a boolean")


def _flatten_toml(data: Mapping[str, Any], prefix: str = "") -> dict[str, object]:
    out: dict[str, object] = {}
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten_toml(cast("dict[str, Any]", value), f"{dotted}."))
        else:
            out[dotted] = value
    return out


def read_config_file(path: Path) -> dict[str, object]:
    """Parse a config file into dotted keys.

    Raises:
        ConfigError: If the file is missing, is not valid TOML, or uses unknown keys.
    """
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    values = _flatten_toml(data)
    _check_known(values, source=str(path))
    return values


def env_overrides(environ: Mapping[str, str]) -> dict[str, object]:
    """``QSR_BATH__N_MODES=100`` becomes ``{"bath.n_modes": "100"}``."""
    out: dict[str, object] = {}
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX) :].lower().replace("__", ".")
        out[key] = value
    _check_known(out, source="environment")
    return out


def _check_known(values: Mapping[str, object], *, source: str) -> None:
    unknown = sorted(k for k in values if k not in _DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config key(s) in {source}: {', '.join(unknown)}")


def build_config(values: Mapping[str, object]) -> RunConfig:
    """Apply dotted-key values on top of the defaults and validate the result."""
    _check_known(values, source="overrides")
    top: dict[str, object] = {}
    sections: dict[str, dict[str, object]] = {}
    for key, raw in values.items():
        section, attr = _locate(key)
        value = _coerce(key, raw)
        if section:
            sections.setdefault(section, {})[attr] = value
        else:
            top[attr] = value
    base = RunConfig()
    for name, changes in sections.items():
        top[name] = replace(getattr(base, name), **changes)
    config = replace(base, **top)  # pyright: ignore[reportArgumentType]
    validate(config)
    return config


def load_config(
    path: Path | None = None,
    *,
    environ: Mapping[str, str] | None = None,
    overrides: Mapping[str, object] | None = None,
) -> RunConfig:
    """Resolve defaults < file < ``QSR_`` environment < explicit overrides.

    Raises:
        ConfigError: On unknown keys, bad values, or a violated (FGR) condition.
    """
    values: dict[str, object] = {}
    if path is not None:
        values.update(read_config_file(path))
    values.update(env_overrides(os.environ if environ is None else environ))
    if overrides:
        values.update(overrides)
    config = build_config(values)
    logger.debug("resolved config: %s", config.to_dict())
    return config


def _require(condition: bool, message: str, kind: str = "invalid config") -> None:
    if not condition:
        raise ConfigError(message, kind=kind)


def _positive(value: float) -> bool:
    return math.isfinite(value) and value > 0


def validate(config: RunConfig) -> None:
    """Check ranges and the Fermi-golden-rule condition ``χ(2β) > 0``.

    Raises:
        ConfigError: With kind ``invalid cutoff``, ``fgr violated`` or ``invalid config``.
    """
    try:
        spec = config.cutoff_spec()
    except ValueError as exc:
        raise ConfigError(str(exc), kind="invalid cutoff") from exc
    _require(_positive(config.beta), f"beta must be positive, got {config.beta}")
    _require(config.g >= 0, f"g must be nonnegative, got {config.g}")
    _require(len(config.g_list) > 0, "g_list must not be empty")
    _require(all(g >= 0 for g in config.g_list), "g_list entries must be nonnegative")
    _require(
        config.sigma in sa.NAMED_OBSERVABLES,
        f"sigma must be one of {', '.join(sa.NAMED_OBSERVABLES)}, got {config.sigma!r}",
    )
    _require(config.times.t_max >= 0, "times.t_max must be nonnegative")
    _require(config.times.n_points >= 1, "times.n_points must be at least 1")
    _require(_positive(config.omega_max), "bath.omega_max must be positive")
    _require(config.bath.n_modes >= 1, "bath.n_modes must be at least 1")
    _require(
        config.bath.rule in QUADRATURE_RULES,
        f"bath.rule must be one of {', '.join(QUADRATURE_RULES)}",
    )
    o = config.oracle
    _require(o.excitation_cap >= 0, "oracle.excitation_cap must be nonnegative")
    _require(o.dim_budget >= 2, "oracle.dim_budget must be at least 2")
    _require(
        o.propagator in PROPAGATOR_CHOICES,
        f"oracle.propagator must be one of {', '.join(PROPAGATOR_CHOICES)}",
    )
    _require(o.krylov_dim >= 2, "oracle.krylov_dim must be at least 2")
    _require(0 < o.recurrence_fraction <= 1, "oracle.recurrence_fraction must lie in (0, 1]")
    _require(o.n_points >= 2, "oracle.n_points must be at least 2")
    tolerances = dataclasses.asdict(config.tolerances)
    for name, value in tolerances.items():
        _require(_positive(value), f"tolerances.{name} must be positive")
    unknown = [f for f in config.output.formats if f not in OUTPUT_FORMATS]
    _require(not unknown, f"unknown output format(s): {', '.join(unknown)}")
    _require(
        fgr_holds(spec, config.beta),
        f"chi(2*beta) vanishes at beta={config.beta}; relaxation rate would be zero",
        kind="fgr violated",
    )
