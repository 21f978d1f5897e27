"""Built-in acceptance experiments."""

from __future__ import annotations

from pathlib import Path

# Current experiment version
EXPERIMENT_VERSION = "v1"

# Available experiments
AVAILABLE_EXPERIMENTS = [
    "triple-consistency",
    "gaussian-scaling",
    "fixed-point-constants",
    "composition-closed-forms",
    "equivalence-pairs",
    "commutativity",
    "stochastic-area",
    "class-l-factorization",
    "monte-carlo-validation",
    "tail-counterexample",
    "retrieval-limit",
    "domain-predicates",
]


def _get_experiments_dir() -> Path:
    """Get the directory containing experiment files."""
    return Path(__file__).parent


def get_experiment_path(name: str, version: str | None = None) -> Path:
    """Get the path to a built-in experiment config.

    Args:
        name: Name of the experiment (e.g., 'gaussian-scaling').
        version: Experiment version (default: current version).

    Returns:
        Path to the experiment YAML file.

    Raises:
        ValueError: If the experiment doesn't exist.
    """
    version = version or EXPERIMENT_VERSION

    if name not in AVAILABLE_EXPERIMENTS:
        available = ", ".join(AVAILABLE_EXPERIMENTS)
        msg = f"Unknown experiment '{name}'. Available: {available}"
        raise ValueError(msg)

    path = _get_experiments_dir() / version / f"{name}.yaml"

    if not path.exists():
        msg = f"Experiment file not found: {path}"
        raise ValueError(msg)

    return path


def list_experiments() -> list[str]:
    """List available experiments."""
    return AVAILABLE_EXPERIMENTS.copy()


def get_experiment_version() -> str:
    """Get current experiment version."""
    return EXPERIMENT_VERSION
