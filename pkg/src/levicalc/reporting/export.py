"""Writers for reports, tables and sample dumps."""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import TYPE_CHECKING
from xml.etree import ElementTree as ET

from pydantic import BaseModel

if TYPE_CHECKING:
    from levicalc.reporting.schema import ExperimentReport


def write_json(report: BaseModel, path: Path) -> Path:
    """Write a report as indented JSON, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    return path


def write_csv(rows: Iterable[Sequence[float]], path: Path, header: Sequence[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_samples_csv(values: Iterable[float], path: Path) -> Path:
    """One ``sample`` column, full float precision."""
    return write_csv(([repr(float(v))] for v in values), path, ("sample",))


def export_junit(reports: Sequence[ExperimentReport], output_path: Path) -> Path:
    """Export experiment checks as JUnit XML.

    Each check becomes a test case, so CI runners list failing checks by name.

    Args:
        reports: Experiment reports.
        output_path: Path to write junit.xml.
    """
    testsuite = ET.Element("testsuite")
    testsuite.set("name", "levicalc acceptance experiments")
    testsuite.set("tests", str(sum(len(r.checks) for r in reports)))
    if reports:
        testsuite.set("timestamp", reports[0].generated_at)

    failures = 0
    for report in reports:
        for check in report.checks:
            testcase = ET.SubElement(testsuite, "testcase")
            testcase.set("name", f"{report.experiment}:{check.name}")
            testcase.set("classname", f"levicalc.{report.experiment}")
            if check.passed:
                continue
            failures += 1
            failure = ET.SubElement(testcase, "failure")
            failure.set("message", check.note or f"{check.name} failed")
            failure.text = f"Value: {check.value}, Threshold: {check.threshold}"

    testsuite.set("failures", str(failures))
    testsuite.set("errors", "0")

    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    tree = ET.ElementTree(testsuite)
    ET.indent(tree, space="  ")
    tree.write(output_path, encoding="unicode", xml_declaration=True)
    return output_path
