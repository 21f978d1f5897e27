"""Schema for report output."""

import os
from datetime import UTC, datetime
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = "1.0.0"


def timestamp() -> str:
    """Report time, pinned by SOURCE_DATE_EPOCH for reproducible outputs."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return datetime.fromtimestamp(int(epoch), UTC).isoformat()
    return datetime.now().isoformat()


class ReportModel(BaseModel):
    """Base for every JSON report."""

    model_config = ConfigDict(ser_json_inf_nan="strings")

    schema_version: str = Field(default=SCHEMA_VERSION)
    generated_at: str = Field(default_factory=timestamp)


class ExponentPoint(BaseModel):
    """One grid point of an exponent table."""

    model_config = ConfigDict(ser_json_inf_nan="strings")

    y: float
    re: float
    im: float


class ExponentTable(ReportModel):
    """Exponent of a law on a y-grid."""

    law: str
    points: list[ExponentPoint]


class TransformOutput(ReportModel):
    """Transformed law together with the domain report that admitted it."""

    map: str
    law: dict[str, Any]
    domain: dict[str, Any]


class CfPoint(BaseModel):
    """Empirical against analytic characteristic function at one y."""

    model_config = ConfigDict(ser_json_inf_nan="strings")

    y: float
    cf_empirical_re: float
    cf_empirical_im: float
    cf_analytic_re: float
    cf_analytic_im: float
    stderr: float
    budget: float | None = None


class ExperimentCheck(BaseModel):
    """A single named assertion inside an experiment."""

    model_config = ConfigDict(ser_json_inf_nan="strings")

    name: str
    value: float | int | bool | None
    threshold: float | int | bool | None
    passed: bool
    note: str = ""


class ExperimentReport(ReportModel):
    """Outcome of a built-in or configured acceptance experiment."""

    experiment: str
    description: str = ""
    checks: list[ExperimentCheck]
    passed: bool
    details: dict[str, Any] = Field(default_factory=dict)


class TailPoint(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")

    w: float
    tail_mass: float


class CompositionReport(ReportModel):
    """Single map equal to a composition, with its image tail."""

    maps: list[str]
    closed_form: str | None = None
    params: dict[str, float] = Field(default_factory=dict)
    finite: bool
    sign: float = 1.0
    image: dict[str, Any] | None = None
    tail: list[TailPoint]
    seed: int | None = None
    n_samples: int | None = None
    ks_statistic: float | None = None
    ks_pvalue: float | None = None
