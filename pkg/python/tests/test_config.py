from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from qsrelax import spin_algebra as sa
from qsrelax.config import (
    RunConfig,
    build_config,
    env_overrides,
    known_keys,
    load_config,
    read_config_file,
)
from qsrelax.errors import ConfigError

from .helpers import write_config


class TestDefaults:
    def test_default_run(self) -> None:
        config = load_config(environ={})
        assert config == RunConfig()
        assert config.omega_max == 16.0
        assert config.kernel().cutoff.lam == 4.0
        assert config.time_grid()[-1] == 20.0

    def test_flat_keys(self) -> None:
        flat = RunConfig().to_dict()
        assert flat["cutoff.lambda"] == 4.0
        assert flat["g_list"] == [0.2, 0.1, 0.05]
        assert flat["bath.omega_max"] is None
        assert list(flat) == sorted(flat)
        assert set(flat) == set(known_keys())

    def test_oracle_settings(self) -> None:
        settings = build_config({"oracle.krylov_dim": "16", "oracle.propagator": "krylov"})
        oracle = settings.oracle_settings()
        assert oracle.propagation.method == "krylov"
        assert oracle.propagation.krylov.krylov_dim == 16
        assert oracle.excitation_cap == 2

    def test_normalized_observable(self) -> None:
        config = build_config({"sigma": "sp", "oracle.normalize_sigma": "true"})
        assert sa.operator_norm(config.observable()) == pytest.approx(1.0)
        np.testing.assert_array_equal(build_config({"sigma": "sp"}).observable(), sa.ladder(1))


class TestSources:
    def test_file(self, tmp_path: Path) -> None:
        path = write_config(
            tmp_path,
            'beta = 0.8\ng_list = [0.3, 0.15]\n\n[bath]\nn_modes = 120\nrule = "gauss"\n'
            '\n[cutoff]\nlambda = 5.0\n',
        )
        config = load_config(path, environ={})
        assert config.beta == 0.8
        assert config.g_list == (0.3, 0.15)
        assert config.bath.n_modes == 120
        assert config.bath.rule == "gauss"
        assert config.cutoff.lam == 5.0

    def test_dotted_keys_in_file(self, tmp_path: Path) -> None:
        path = write_config(tmp_path, '"times.t_max" = 5.0\n')
        assert read_config_file(path) == {"times.t_max": 5.0}

    def test_environment(self) -> None:
        env = {"QSR_BATH__N_MODES": "80", "QSR_G": "0.05", "HOME": "/root"}
        assert env_overrides(env) == {"bath.n_modes": "80", "g": "0.05"}
        config = load_config(environ=env)
        assert config.bath.n_modes == 80
        assert config.g == 0.05

    def test_precedence(self, tmp_path: Path) -> None:
        path = write_config(tmp_path, "g = 0.3\nbeta = 2.0\nseed = 4\n")
        config = load_config(
            path, environ={"QSR_G": "0.2", "QSR_SEED": "5"}, overrides={"g": 0.1}
        )
        assert config.beta == 2.0
        assert config.seed == 5
        assert config.g == 0.1

    def test_list_from_string(self) -> None:
        config = build_config({"g_list": "0.4, 0.2,0.1", "output.formats": "json,csv"})
        assert config.g_list == (0.4, 0.2, 0.1)
        assert config.output.formats == ("json", "csv")

    def test_optional_omega_max(self) -> None:
        assert build_config({"bath.omega_max": "20"}).omega_max == 20.0


class TestErrors:
    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="not found"):
            _ = load_config(tmp_path / "absent.toml", environ={})

    def test_malformed_toml(self, tmp_path: Path) -> None:
        path = write_config(tmp_path, "beta = = 1\n")
        with pytest.raises(ConfigError):
            _ = read_config_file(path)

    def test_unknown_file_key(self, tmp_path: Path) -> None:
        path = write_config(tmp_path, "[bath]\nmodes = 3\n")
        with pytest.raises(ConfigError, match=r"unknown config key.*bath\.modes"):
            _ = read_config_file(path)

    def test_unknown_environment_key(self) -> None:
        with pytest.raises(ConfigError, match="environment"):
            _ = env_overrides({"QSR_BETTA": "1"})

    def test_bad_value(self) -> None:
        with pytest.raises(ConfigError, match="bath.n_modes"):
            _ = build_config({"bath.n_modes": "many"})
        with pytest.raises(ConfigError):
            _ = build_config({"oracle.normalize_sigma": "perhaps"})
        with pytest.raises(ConfigError):
            _ = build_config({"bath.n_modes": True})

    def test_invalid_cutoff(self) -> None:
        with pytest.raises(ConfigError) as info:
            _ = build_config({"cutoff.lambda": "-1"})
        assert info.value.kind == "invalid cutoff"
        assert info.value.exit_code == 2

    def test_fgr_violated(self) -> None:
        with pytest.raises(ConfigError) as info:
            _ = build_config({"cutoff.kind": "notched_gaussian", "cutoff.notch_center": "2.0"})
        assert info.value.kind == "fgr violated"

    @pytest.mark.parametrize(
        ("key", "value"),
        [
            ("beta", "0"),
            ("g", "-0.1"),
            ("g_list", ""),
            ("sigma", "sq"),
            ("bath.rule", "simpson"),
            ("oracle.propagator", "magic"),
            ("oracle.recurrence_fraction", "1.5"),
            ("tolerances.krylov", "0"),
            ("output.formats", "csv,png"),
        ],
    )
    def test_range_checks(self, key: str, value: str) -> None:
        with pytest.raises(ConfigError) as info:
            _ = build_config({key: value})
        assert info.value.kind == "invalid config"
