"""Symmetric stable laws as fixed points of integral maps.

A symmetric strictly p-stable law γ with exponent -σ|y|^p satisfies
I^{h,r}_{(a,b]}(γ) = γ^{*c} with c = ∫|h(t)|^p ρ(dt), whenever c is finite.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from levicalc.compose.pushforward import compose
from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import PreconditionError
from levicalc.kernels.mapping import IntegralMap, p_functional
from levicalc.measures.exponent import ExponentFn
from levicalc.measures.levy import ParametricMeasure, StableFamily, stable_coef, stable_measure
from levicalc.measures.triple import LevyTriple
from levicalc.numerics.grids import DEFAULT_Y_GRID
from levicalc.reporting.schema import ReportModel
from levicalc.transform.exponent import transform_exponent
from levicalc.transform.triple import transform_triple

logger = logging.getLogger(__name__)

FIXED_POINT_ATOL = 1e-8
DEFAULT_P_GRID = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)


class StableLaw(BaseModel):
    """Symmetric strictly p-stable law with exponent -σ|y|^p; p = 2 is the Gaussian."""

    model_config = ConfigDict(frozen=True)

    index: float = Field(gt=0, le=2)
    sigma: float = Field(default=1.0, gt=0)
    symmetric: bool = True

    @model_validator(mode="after")
    def _strict(self) -> StableLaw:
        if not self.symmetric:
            raise ValueError("only symmetric strictly stable laws are supported")
        return self

    def exponent(self) -> ExponentFn:
        return ExponentFn.stable(self.index, self.sigma)

    def triple(self) -> LevyTriple:
        if self.index == 2:
            return LevyTriple(gaussian_var=2.0 * self.sigma)
        return LevyTriple(levy=stable_measure(self.index, stable_coef(self.index, self.sigma)))

    def label(self) -> str:
        return f"stable(p={self.index:g}, σ={self.sigma:g})"


def _check_index(p: float) -> None:
    if not 0 < p <= 2:
        raise PreconditionError(f"stable index must lie in (0, 2], got {p}")


def fixed_point_constant(m: IntegralMap, p: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """c = ∫|h|^p ρ(dt); ``inf`` means γ_p is not a fixed point of the map.

    Raises:
        PreconditionError: If p is outside (0, 2].
    """
    _check_index(p)
    return p_functional(m, p, tol)


def _triple_index(t: LevyTriple, atol: float) -> float | None:
    """Stable index read off a transformed triple, allowing a round-off shift."""
    if abs(t.shift) > atol:
        return None
    levy = t.levy
    if levy.is_empty():
        return 2.0 if t.gaussian_var > 0 else None
    if t.gaussian_var == 0 and isinstance(levy, ParametricMeasure):
        if isinstance(levy.family, StableFamily):
            return levy.family.index
    return None


class FixedPointReport(ReportModel):
    """Outcome of :func:`verify_fixed_point`."""

    map: str
    law: str
    index: float
    constant: float
    max_discrepancy: float | None = None
    index_preserved: bool | None = None
    atol: float
    passed: bool
    note: str = ""


def verify_fixed_point(
    m: IntegralMap,
    s: StableLaw,
    y_grid: Sequence[float] = DEFAULT_Y_GRID,
    tol: Tolerance = DEFAULT_TOLERANCE,
    atol: float = FIXED_POINT_ATOL,
) -> FixedPointReport:
    """Check I(γ) = γ^{*c} at the exponent level and that the index survives."""
    c = fixed_point_constant(m, s.index, tol)
    base = {"map": m.label(), "law": s.label(), "index": s.index, "constant": c, "atol": atol}
    if not math.isfinite(c):
        return FixedPointReport(**base, passed=False, note=f"∫|h|^{s.index:g} dρ diverges")

    y = np.asarray(y_grid, dtype=float)
    phi = s.exponent()
    transformed = transform_exponent(m, phi, tol)(y)
    expected = c * phi(y)
    scale = np.maximum(1.0, np.abs(expected))
    discrepancy = float(np.max(np.abs(transformed - expected) / scale))

    image = transform_triple(m, s.triple(), tol)
    preserved = _triple_index(image, atol) == s.index
    logger.debug("fixed point of %s at p=%g: c=%g, discrepancy %.2e", m.label(), s.index, c, discrepancy)
    return FixedPointReport(
        **base,
        max_discrepancy=discrepancy,
        index_preserved=preserved,
        passed=discrepancy <= atol and preserved,
    )


class PreservationRow(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    p: float
    constant: float
    finite: bool


class PreservationReport(ReportModel):
    """Which stable indices a map keeps as fixed points."""

    map: str
    rows: list[PreservationRow]
    preserved: bool


def class_preservation_scan(
    m: IntegralMap, p_grid: Sequence[float] = DEFAULT_P_GRID, tol: Tolerance = DEFAULT_TOLERANCE
) -> PreservationReport:
    """The class of stable laws is preserved iff ∫|h|^p dρ is finite for every p in (0, 2]."""
    rows = []
    for p in p_grid:
        c = fixed_point_constant(m, float(p), tol)
        rows.append(PreservationRow(p=float(p), constant=c, finite=math.isfinite(c)))
    return PreservationReport(map=m.label(), rows=rows, preserved=all(r.finite for r in rows))


class MultiplicativityRow(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    p: float
    composed: float
    product: float
    rel_error: float


class MultiplicativityReport(ReportModel):
    """c(I₁∘I₂, p) against c(I₁, p)·c(I₂, p)."""

    first: str
    second: str
    composed_map: str
    rows: list[MultiplicativityRow]
    atol: float
    passed: bool


def multiplicativity_check(
    m1: IntegralMap,
    m2: IntegralMap,
    p_grid: Sequence[float] = DEFAULT_P_GRID,
    tol: Tolerance = DEFAULT_TOLERANCE,
    atol: float = FIXED_POINT_ATOL,
) -> MultiplicativityReport:
    """Fixed-point constants multiply under composition.

    Rows where both sides are infinite count as agreeing.
    """
    single = compose([m1, m2], tol)
    rows = []
    for p in p_grid:
        composed = fixed_point_constant(single, float(p), tol)
        product = fixed_point_constant(m1, float(p), tol) * fixed_point_constant(m2, float(p), tol)
        if math.isinf(composed) and math.isinf(product):
            error = 0.0
        else:
            error = abs(composed - product) / max(1.0, abs(product))
        rows.append(MultiplicativityRow(p=float(p), composed=composed, product=product, rel_error=error))
    return MultiplicativityReport(
        first=m1.label(),
        second=m2.label(),
        composed_map=single.label(),
        rows=rows,
        atol=atol,
        passed=all(r.rel_error <= atol for r in rows),
    )
