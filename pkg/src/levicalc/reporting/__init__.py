"""Report schemas and writers."""

from levicalc.reporting.export import export_junit, write_csv, write_json, write_samples_csv
from levicalc.reporting.schema import (
    SCHEMA_VERSION,
    CfPoint,
    CompositionReport,
    ExperimentCheck,
    ExperimentReport,
    ExponentPoint,
    ExponentTable,
    ReportModel,
    TailPoint,
    TransformOutput,
)

__all__ = [
    "SCHEMA_VERSION",
    "CfPoint",
    "CompositionReport",
    "ExperimentCheck",
    "ExperimentReport",
    "ExponentPoint",
    "ExponentTable",
    "ReportModel",
    "TailPoint",
    "TransformOutput",
    "export_junit",
    "write_csv",
    "write_json",
    "write_samples_csv",
]
