"""Tests for configuration loading and environment settings."""

from pathlib import Path
from textwrap import dedent

import pytest
from pydantic import ValidationError

from levicalc.config import (
    DEFAULT_TOLERANCE,
    RunConfig,
    Tolerance,
    load_run_config,
    resolve_settings,
)


class TestRunConfigLoading:
    """Tests for run config file loading."""

    def test_load_minimal_config(self, tmp_path: Path):
        """Loads a minimal config with defaults."""
        config_file = tmp_path / "config.yaml"
        config_file.write_text(
            dedent("""
            command: exponent
            law: gaussian
            """)
        )

        cfg = load_run_config(config_file)

        assert cfg.command == "exponent"
        assert cfg.law == "gaussian"
        assert cfg.maps == []
        assert cfg.tolerance == DEFAULT_TOLERANCE
        assert cfg.y_grid == "default"
        assert cfg.seed is None

    def test_empty_file_gives_defaults(self, tmp_path: Path):
        """An empty file validates to the default config."""
        config_file = tmp_path / "empty.yaml"
        config_file.write_text("")

        cfg = load_run_config(config_file)

        assert cfg == RunConfig()

    def test_relative_paths_resolved(self, tmp_path: Path):
        """Law and map paths are resolved against the config directory."""
        (tmp_path / "law.json").write_text('{"gaussian_var": 1.0}')
        (tmp_path / "map.json").write_text("{}")
        config_file = tmp_path / "config.yaml"
        config_file.write_text(
            dedent("""
            command: transform
            law: law.json
            maps: [map.json, class_l]
            """)
        )

        cfg = load_run_config(config_file)

        assert cfg.law == str(tmp_path / "law.json")
        assert cfg.maps == [str(tmp_path / "map.json"), "class_l"]

    def test_inline_law(self, tmp_path: Path):
        """Laws may be given inline."""
        config_file = tmp_path / "config.yaml"
        config_file.write_text(
            dedent("""
            command: exponent
            law:
              shift: 2.0
            """)
        )

        cfg = load_run_config(config_file)

        assert cfg.law == {"shift": 2.0}

    def test_tolerance_and_monte_carlo_sections(self, tmp_path: Path):
        """Nested sections validate into their models."""
        config_file = tmp_path / "config.yaml"
        config_file.write_text(
            dedent("""
            command: simulate
            seed: 7
            tolerance:
              epsabs: 1.0e-7
            monte_carlo:
              n_paths: 500
            """)
        )

        cfg = load_run_config(config_file)

        assert cfg.tolerance.epsabs == 1e-7
        assert cfg.tolerance.epsrel == DEFAULT_TOLERANCE.epsrel
        assert cfg.monte_carlo.n_paths == 500
        assert cfg.seed == 7

    def test_unknown_command_rejected(self, tmp_path: Path):
        """Commands outside the CLI surface fail validation."""
        config_file = tmp_path / "config.yaml"
        config_file.write_text("command: plot\n")

        with pytest.raises(ValidationError):
            load_run_config(config_file)


class TestEnvVarSubstitution:
    """Tests for ${VAR} substitution."""

    def test_env_var_substitution(self, tmp_path: Path, monkeypatch):
        """Substitutes environment variables in config."""
        monkeypatch.setenv("LAW_DIR", "/data/laws")
        config_file = tmp_path / "config.yaml"
        config_file.write_text(
            dedent("""
            command: exponent
            law: ${LAW_DIR}/gaussian.json
            """)
        )

        cfg = load_run_config(config_file)

        assert cfg.law == "/data/laws/gaussian.json"

    def test_missing_env_var_raises(self, tmp_path: Path, monkeypatch):
        """Raises error for missing environment variable."""
        monkeypatch.delenv("LEVI_CALC_MISSING", raising=False)
        config_file = tmp_path / "config.yaml"
        config_file.write_text("command: exponent\nlaw: ${LEVI_CALC_MISSING}\n")

        with pytest.raises(ValueError, match="LEVI_CALC_MISSING"):
            load_run_config(config_file)


class TestTolerance:
    """Tests for the tolerance model."""

    def test_defaults(self):
        assert DEFAULT_TOLERANCE.epsabs == 1e-9
        assert DEFAULT_TOLERANCE.epsrel == 1e-8

    def test_nonpositive_epsabs_rejected(self):
        with pytest.raises(ValidationError):
            Tolerance(epsabs=0.0)

    def test_frozen(self):
        with pytest.raises(ValidationError):
            DEFAULT_TOLERANCE.epsabs = 1.0  # type: ignore[misc]


class TestSettings:
    """Tests for LEVI_CALC_THREADS."""

    def test_explicit_threads(self):
        assert resolve_settings({"LEVI_CALC_THREADS": "3"}).threads == 3

    def test_unset_uses_cpu_count(self):
        threads = resolve_settings({}).threads
        assert 1 <= threads <= 8

    @pytest.mark.parametrize("raw", ["0", "-2", "many"])
    def test_invalid_threads(self, raw: str):
        with pytest.raises(ValueError, match="LEVI_CALC_THREADS"):
            resolve_settings({"LEVI_CALC_THREADS": raw})
