"""Tests for built-in acceptance experiments."""

import pytest

from levicalc.config import RunConfig, load_run_config
from levicalc.errors import InputError
from levicalc.experiments import (
    AVAILABLE_EXPERIMENTS,
    get_experiment_path,
    get_experiment_version,
    list_experiments,
)
from levicalc.experiments.runner import EXPERIMENTS, run_builtin, run_experiment

FAST = [
    "triple-consistency",
    "gaussian-scaling",
    "fixed-point-constants",
    "stochastic-area",
    "class-l-factorization",
    "tail-counterexample",
    "retrieval-limit",
    "domain-predicates",
]
SLOW = [name for name in AVAILABLE_EXPERIMENTS if name not in FAST]


class TestExperimentLoader:
    """Tests for experiment loading functions."""

    def test_list_matches_runner(self):
        assert list_experiments() == list(EXPERIMENTS)

    def test_get_experiment_version(self):
        assert get_experiment_version() == "v1"

    def test_paths_load(self):
        for name in AVAILABLE_EXPERIMENTS:
            path = get_experiment_path(name)
            assert path.suffix == ".yaml"
            cfg = load_run_config(path)
            assert cfg.command == "experiment"
            assert cfg.experiment == name

    def test_unknown_experiment(self):
        with pytest.raises(ValueError, match="Unknown experiment"):
            get_experiment_path("nonexistent")


class TestRunner:
    """Dispatch and reporting."""

    def test_needs_experiment_command(self):
        with pytest.raises(InputError):
            run_experiment(RunConfig(command="domain", law="gaussian", maps=["class_l"]))

    def test_unknown_name(self):
        with pytest.raises(InputError, match="unknown experiment"):
            run_experiment(RunConfig(experiment="nope"))

    def test_simulation_needs_seed(self):
        cfg = RunConfig(experiment="monte-carlo-validation", law="compound_poisson")
        with pytest.raises(InputError, match="needs a seed"):
            run_experiment(cfg)

    def test_gaussian_scaling_details(self):
        report = run_builtin("gaussian-scaling")
        assert report.passed
        assert report.details["gaussian_var"] == pytest.approx(1.0 / 3.0)
        assert {c.name for c in report.checks} == {"gaussian_var", "exponent"}

    def test_divergent_constants_flagged(self):
        report = run_builtin("fixed-point-constants")
        divergent = [c for c in report.checks if c.name.startswith("divergent/")]
        assert divergent
        assert all(c.passed for c in divergent)


@pytest.mark.parametrize("name", FAST)
def test_fast_experiment_passes(name: str):
    report = run_builtin(name)
    failed = [c.name for c in report.checks if not c.passed]
    assert report.passed, failed


@pytest.mark.slow
@pytest.mark.parametrize("name", SLOW)
def test_slow_experiment_passes(name: str):
    report = run_builtin(name)
    failed = [c.name for c in report.checks if not c.passed]
    assert report.passed, failed
