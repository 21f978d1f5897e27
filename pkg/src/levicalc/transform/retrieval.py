"""Retrieval of Φ from the transform: averaging the integrand on (c, x] as x ↓ c.

The average (1/(x-c)) ∫_c^x Φ((h(t)/h(c))·y)·(r'(t)/r'(c)) dt tends to Φ(y).
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import PreconditionError
from levicalc.kernels.mapping import IntegralMap
from levicalc.measures.exponent import ExponentFn
from levicalc.numerics.grids import DEFAULT_Y_GRID
from levicalc.numerics.quadrature import integrate_complex
from levicalc.reporting.schema import ReportModel

# Errors below this are treated as exact when fitting the order.
_EXACT = 1e-14


class RetrievalRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    width: float
    error: float


class RetrievalReport(ReportModel):
    """Sup-grid errors of the averaged integrand against Φ."""

    c: float
    rows: list[RetrievalRow]
    monotone: bool
    order: float | None = None


def retrieval_limit_check(
    m: IntegralMap,
    phi: ExponentFn,
    c: float,
    x_sequence: Sequence[float],
    y_grid: Sequence[float] = DEFAULT_Y_GRID,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> RetrievalReport:
    """Tabulate how fast the averaged transform recovers Φ near t = c.

    Args:
        m: Map with h(c) ≠ 0 and r'(c) ≠ 0.
        phi: Exponent to recover.
        c: Point inside (a, b).
        x_sequence: Upper ends decreasing to c.
        y_grid: Grid for the sup error.
        tol: Quadrature tolerances.

    Returns:
        Error table with monotonicity flag and the fitted order in (x - c).

    Raises:
        PreconditionError: If h(c) = 0, r'(c) = 0 or c is outside (a, b).
    """
    if not m.a < c < m.b:
        raise PreconditionError(f"c={c} must lie inside ({m.a}, {m.b})")
    h_c = float(m.h(c))
    slope_c = float(m.r.derivative(c))
    if h_c == 0 or not math.isfinite(h_c):
        raise PreconditionError(f"h(c) must be finite and nonzero, got {h_c}")
    if slope_c == 0 or not math.isfinite(slope_c):
        raise PreconditionError(f"r'(c) must be finite and nonzero, got {slope_c}")

    y = np.asarray(y_grid, dtype=float)
    target = phi(y)
    rows: list[RetrievalRow] = []
    for x in x_sequence:
        if not c < x <= m.b:
            raise PreconditionError(f"x={x} must lie in ({c}, {m.b}]")

        def integrand(t: float) -> np.ndarray:
            ratio = float(m.h(t)) / h_c
            weight = float(m.r.derivative(t)) / slope_c
            return phi.func(ratio * y) * weight

        average = integrate_complex(integrand, c, x, tol).value / (x - c)
        rows.append(RetrievalRow(width=x - c, error=float(np.max(np.abs(average - target)))))

    errors = np.array([row.error for row in rows])
    widths = np.array([row.width for row in rows])
    monotone = bool(np.all(np.diff(errors) <= _EXACT))
    order = None
    usable = errors > _EXACT
    if np.count_nonzero(usable) >= 2:
        order = float(np.polyfit(np.log(widths[usable]), np.log(errors[usable]), 1)[0])
    return RetrievalReport(c=c, rows=rows, monotone=monotone, order=order)
