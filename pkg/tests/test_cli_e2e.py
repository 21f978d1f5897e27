"""End-to-end tests for CLI."""

import json
import subprocess
import sys
from pathlib import Path
from xml.etree import ElementTree as ET

import pytest

import levicalc

PROJECT_ROOT = Path(__file__).parent.parent
DATA = PROJECT_ROOT / "data"


def _cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "levicalc", *args],
        capture_output=True,
        text=True,
        cwd=PROJECT_ROOT,
    )


class TestCLICommands:
    """E2E tests for the single-purpose commands."""

    def test_exponent_gaussian(self):
        result = _cli("exponent", "--law", "gaussian", "--y-grid", "1,2")

        assert result.returncode == 0, f"CLI failed: {result.stderr}"
        points = json.loads(result.stdout)["points"]
        assert [p["re"] for p in points] == pytest.approx([-0.5, -2.0])
        assert [p["im"] for p in points] == pytest.approx([0.0, 0.0])

    def test_exponent_from_json_file(self):
        result = _cli("exponent", "--law", str(DATA / "laws" / "cauchy.json"), "--y-grid", "2")

        assert result.returncode == 0, f"CLI failed: {result.stderr}"
        assert json.loads(result.stdout)["points"][0]["re"] == pytest.approx(-2.0)

    def test_transform_outside_domain_exits_3(self, tmp_path: Path):
        out = tmp_path / "domain.json"
        result = _cli("transform", "--law", "log_moment_infinite", "--map", "neg_log", "--out", str(out))

        assert result.returncode == 3
        assert "example1_logmoment" in result.stderr
        assert json.loads(out.read_text())["admitted"] is False

    def test_transform_writes_image(self, tmp_path: Path):
        out = tmp_path / "image.json"
        result = _cli("transform", "--law", "gaussian", "--map", "unit_linear", "--out", str(out))

        assert result.returncode == 0, f"CLI failed: {result.stderr}"
        assert json.loads(out.read_text())["law"]["gaussian_var"] == pytest.approx(1.0 / 3.0)

    def test_transformed_law_reloads(self, tmp_path: Path):
        out = tmp_path / "image.json"
        result = _cli("transform", "--law", "pareto2", "--map", "unit_linear", "--out", str(out))
        assert result.returncode == 0, f"CLI failed: {result.stderr}"
        assert '"Infinity"' in out.read_text()

        law_path = tmp_path / "image_law.json"
        law_path.write_text(json.dumps(json.loads(out.read_text())["law"]))
        again = _cli("exponent", "--law", str(law_path), "--y-grid", "0.5")

        assert again.returncode == 0, f"CLI failed: {again.stderr}"
        assert json.loads(again.stdout)["points"][0]["re"] < 0.0

    def test_compose_identifies_catalog_entry(self):
        result = _cli("compose", "--map", "class_l", "--map", "thorin_half")

        assert result.returncode == 0, f"CLI failed: {result.stderr}"
        assert json.loads(result.stdout)["closed_form"] == "thorin"
        assert "Composition: thorin" in result.stderr

    def test_compose_sampling_needs_seed(self):
        result = _cli("compose", "--map", "unit_linear", "--samples", "200")

        assert result.returncode == 2
        assert "--seed" in result.stderr

    def test_fixed_point_class_l(self):
        result = _cli("fixed-point", "--map", "class_l", "--p", "1")

        assert result.returncode == 0, f"CLI failed: {result.stderr}"
        report = json.loads(result.stdout)
        assert report["constant"] == pytest.approx(1.0)
        assert report["passed"] is True

    def test_simulate_is_deterministic(self, tmp_path: Path):
        args = [
            "simulate",
            "--law",
            "compound_poisson",
            "--map",
            "unit_linear",
            "--seed",
            "7",
            "--n-paths",
            "500",
            "--resolution",
            "100",
        ]
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"

        assert _cli(*args, "--samples-csv", str(first)).returncode == 0
        assert _cli(*args, "--samples-csv", str(second)).returncode == 0
        assert first.read_text() == second.read_text()
        assert first.read_text().splitlines()[0] == "sample"
        assert len(first.read_text().splitlines()) == 501

    def test_classify_law_bad_param(self):
        result = _cli("classify-law", "--law", "gaussian", "--class", "ID_log_m", "--param", "m")

        assert result.returncode == 2

    def test_unknown_law(self):
        result = _cli("exponent", "--law", "nope")

        assert result.returncode == 2


class TestCLIRun:
    """E2E tests for CLI run command."""

    def test_run_experiment_produces_outputs(self, tmp_path: Path):
        out_dir = tmp_path / "output"
        result = _cli("run", "--experiment", "gaussian-scaling", "--out", str(out_dir), "--format", "junit")

        assert result.returncode == 0, f"CLI failed: {result.stderr}"
        report = json.loads((out_dir / "report.json").read_text())
        assert report["experiment"] == "gaussian-scaling"
        assert report["passed"] is True
        assert report["details"]["gaussian_var"] == pytest.approx(1.0 / 3.0)

        root = ET.parse(out_dir / "junit.xml").getroot()
        assert root.get("failures") == "0"

    def test_run_needs_exactly_one_source(self):
        assert _cli("run").returncode == 2

    def test_run_config_dispatches_command(self, tmp_path: Path):
        config = tmp_path / "domain.yaml"
        config.write_text("command: domain\nlaw: pareto2\nmaps: [neg_log]\n", encoding="utf-8")
        result = _cli("run", "--config", str(config), "--out", str(tmp_path / "out"))

        assert result.returncode == 0, f"CLI failed: {result.stderr}"
        assert json.loads((tmp_path / "out" / "report.json").read_text())["admitted"] is True

    def test_cli_version(self):
        result = _cli("version")

        assert result.returncode == 0
        assert f"levicalc v{levicalc.__version__}" in result.stdout

    def test_cli_help(self):
        result = _cli("--help")

        assert result.returncode == 0
        assert "run" in result.stdout
        assert "compose" in result.stdout
