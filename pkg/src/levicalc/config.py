"""Configuration schema and loader for levicalc."""

import os
import re
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field

THREADS_ENV_VAR = "LEVI_CALC_THREADS"


class Tolerance(BaseModel):
    """Quadrature tolerances and the improper-integral schedule."""

    model_config = ConfigDict(frozen=True)

    epsabs: float = Field(default=1e-9, gt=0)
    epsrel: float = Field(default=1e-8, ge=0)
    limit: int = Field(default=2000, ge=10, description="Subintervals per quadrature piece")
    max_doublings: int = Field(default=64, ge=4, description="Pieces in a doubling schedule")
    burn_in: int = Field(default=10, ge=0, description="Pieces before the growth test may fire")


DEFAULT_TOLERANCE = Tolerance()


class MonteCarloSettings(BaseModel):
    """Defaults for path simulation."""

    n_paths: int = Field(default=20_000, ge=100)
    resolution: int = Field(default=1000, ge=2)
    epsilon: float = Field(default=1e-3, gt=0)
    block_size: int = Field(default=2048, ge=1)
    k_sigma: float = Field(default=5.0, gt=0)


class Settings(BaseModel):
    """Process-wide settings resolved from the environment."""

    threads: int = Field(default=1, ge=1)


Command = Literal[
    "exponent",
    "transform",
    "domain",
    "compose",
    "simulate",
    "fixed-point",
    "factorize",
    "classify-law",
    "experiment",
]


class RunConfig(BaseModel):
    """A single CLI invocation described as a file.

    Laws and maps are either paths to JSON files or inline objects.
    """

    command: Command = "experiment"
    description: str = ""
    law: str | dict[str, Any] | None = None
    maps: list[str | dict[str, Any]] = Field(default_factory=list)
    prime_map: str | dict[str, Any] | None = None
    tolerance: Tolerance = Field(default_factory=Tolerance)
    monte_carlo: MonteCarloSettings = Field(default_factory=MonteCarloSettings)
    seed: int | None = None
    y_grid: str = "default"
    out: str | None = None
    format: Literal["json", "csv"] = "json"
    experiment: str | None = None
    params: dict[str, Any] = Field(default_factory=dict)


def resolve_settings(environ: dict[str, str] | None = None) -> Settings:
    """Read settings from environment variables.

    Args:
        environ: Mapping to read from (default: ``os.environ``).

    Returns:
        Resolved settings.

    Raises:
        ValueError: If LEVI_CALC_THREADS is not a positive integer.
    """
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return Settings(threads=min(os.cpu_count() or 1, 8))
    try:
        threads = int(raw)
    except ValueError:
        msg = f"{THREADS_ENV_VAR} must be a positive integer, got '{raw}'"
        raise ValueError(msg) from None
    if threads < 1:
        msg = f"{THREADS_ENV_VAR} must be a positive integer, got '{raw}'"
        raise ValueError(msg)
    return Settings(threads=threads)


def _substitute_env_vars(text: str) -> str:
    """Substitute ${VAR} with environment variable values."""
    pattern = r"\$\{(\w+)\}"

    def replacer(match: re.Match) -> str:
        var_name = match.group(1)
        if var_name not in os.environ:
            msg = f"Environment variable '{var_name}' referenced in config is not set"
            raise ValueError(msg)
        return os.environ[var_name]

    return re.sub(pattern, replacer, text)


def _substitute_in_dict(data: dict | list | str) -> dict | list | str:
    """Recursively substitute env vars in dict/list/str."""
    if isinstance(data, dict):
        return {k: _substitute_in_dict(v) for k, v in data.items()}
    elif isinstance(data, list):
        return [_substitute_in_dict(item) for item in data]
    elif isinstance(data, str):
        return _substitute_env_vars(data)
    return data


def load_run_config(path: Path | str) -> RunConfig:
    """Load a run configuration from a YAML file.

    Relative law and map paths are resolved against the config file's
    directory.

    Args:
        path: Path to YAML configuration file.

    Returns:
        Parsed RunConfig object.
    """
    path = Path(path)
    content = path.read_text(encoding="utf-8")
    data = yaml.safe_load(content)

    if data is None:
        data = {}

    # Substitute environment variables
    data = _substitute_in_dict(data)

    cfg = RunConfig(**data)
    base = path.parent

    def _resolve(ref: str | dict[str, Any] | None) -> str | dict[str, Any] | None:
        if isinstance(ref, str) and not Path(ref).is_absolute():
            candidate = base / ref
            if candidate.exists():
                return str(candidate)
        return ref

    return cfg.model_copy(
        update={
            "law": _resolve(cfg.law),
            "maps": [_resolve(m) for m in cfg.maps],
            "prime_map": _resolve(cfg.prime_map),
        }
    )
