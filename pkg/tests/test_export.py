"""Tests for report writers and the JUnit export."""

import csv
import json
from pathlib import Path
from xml.etree import ElementTree as ET

from levicalc.reporting import (
    SCHEMA_VERSION,
    ExperimentCheck,
    ExperimentReport,
    TailPoint,
    export_junit,
    write_csv,
    write_json,
    write_samples_csv,
)
from levicalc.reporting.schema import CompositionReport, timestamp


def _create_test_reports() -> list[ExperimentReport]:
    """Two experiments, one with a failing check."""
    return [
        ExperimentReport(
            experiment="gaussian-scaling",
            checks=[
                ExperimentCheck(name="variance", value=1.0 / 3.0, threshold=1e-9, passed=True),
            ],
            passed=True,
        ),
        ExperimentReport(
            experiment="fixed-point",
            checks=[
                ExperimentCheck(name="constant", value=0.5, threshold=1e-8, passed=True),
                ExperimentCheck(
                    name="index_preserved",
                    value=False,
                    threshold=True,
                    passed=False,
                    note="image is not strictly stable",
                ),
            ],
            passed=False,
        ),
    ]


class TestWriters:
    """JSON and CSV writers."""

    def test_json_keeps_infinity(self, tmp_path: Path):
        report = CompositionReport(
            maps=["e^{-t} dt"],
            finite=False,
            tail=[TailPoint(w=0.0, tail_mass=float("inf")), TailPoint(w=0.5, tail_mass=0.69)],
        )
        path = write_json(report, tmp_path / "nested" / "report.json")

        data = json.loads(path.read_text())
        assert data["schema_version"] == SCHEMA_VERSION
        assert data["tail"][0]["tail_mass"] == "Infinity"

    def test_csv_header_and_rows(self, tmp_path: Path):
        path = write_csv([(0.5, 1.0), (1.0, 0.25)], tmp_path / "t.csv", ("w", "tail"))

        with path.open() as f:
            rows = list(csv.reader(f))
        assert rows == [["w", "tail"], ["0.5", "1.0"], ["1.0", "0.25"]]

    def test_samples_full_precision(self, tmp_path: Path):
        path = write_samples_csv([1.0 / 3.0, -2.0], tmp_path / "samples.csv")

        lines = path.read_text().splitlines()
        assert lines[0] == "sample"
        assert float(lines[1]) == 1.0 / 3.0

    def test_timestamp_pinned(self, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
        assert timestamp().startswith("1970-01-01T00:00:00")


class TestJunitExport:
    """Tests for JUnit export."""

    def test_creates_valid_xml(self, tmp_path: Path):
        output_path = export_junit(_create_test_reports(), tmp_path / "junit.xml")

        root = ET.parse(output_path).getroot()
        assert root.tag == "testsuite"
        assert root.get("name") == "levicalc acceptance experiments"
        assert root.get("tests") == "3"
        assert root.get("failures") == "1"

    def test_one_case_per_check(self, tmp_path: Path):
        output_path = export_junit(_create_test_reports(), tmp_path / "junit.xml")

        tree = ET.parse(output_path)
        names = [tc.get("name") for tc in tree.findall(".//testcase")]
        assert names == ["gaussian-scaling:variance", "fixed-point:constant", "fixed-point:index_preserved"]
        classes = {tc.get("classname") for tc in tree.findall(".//testcase")}
        assert classes == {"levicalc.gaussian-scaling", "levicalc.fixed-point"}

    def test_failure_carries_note(self, tmp_path: Path):
        output_path = export_junit(_create_test_reports(), tmp_path / "junit.xml")

        failures = ET.parse(output_path).findall(".//failure")
        assert len(failures) == 1
        assert failures[0].get("message") == "image is not strictly stable"

    def test_empty(self, tmp_path: Path):
        root = ET.parse(export_junit([], tmp_path / "junit.xml")).getroot()
        assert root.get("tests") == "0"
