"""Conditional stochastic area: a selfdecomposable law with a factorization.

For fixed u > 0 the characteristic function χ(t) = φ(t)·ψ(t) splits into
φ(t) = tu/sinh(tu) and ψ(t) = exp(-(tu·coth(tu) - 1)), and the law of φ is
the class-L image of the law of ψ:

    log φ(t) = ∫_0^∞ log ψ(e^{-s}t) ds.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from levicalc.analysis.classes import class_l_map
from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import PreconditionError
from levicalc.measures.exponent import ExponentFn
from levicalc.reporting.schema import ReportModel
from levicalc.transform.exponent import transform_exponent

logger = logging.getLogger(__name__)

AREA_ATOL = 1e-6
DEFAULT_T_GRID = tuple(float(t) for t in np.linspace(0.1, 5.0, 20))
_SMALL = 1e-4


def log_sinhc(x: np.ndarray) -> np.ndarray:
    """log(x / sinh x), even in x, 0 at the origin."""
    x = np.abs(np.asarray(x, dtype=float))
    out = -(x**2) / 6.0
    big = x > _SMALL
    xb = x[big]
    out[big] = np.log(xb) - xb - np.log(-np.expm1(-2.0 * xb)) + math.log(2.0)
    return out


def coth_excess(x: np.ndarray) -> np.ndarray:
    """x·coth(x) - 1, even in x, 0 at the origin."""
    x = np.abs(np.asarray(x, dtype=float))
    out = x**2 / 3.0
    big = x > _SMALL
    xb = x[big]
    out[big] = xb / np.tanh(xb) - 1.0
    return out


def area_exponents(u: float) -> tuple[ExponentFn, ExponentFn]:
    """Exponents log φ and log ψ at a fixed u."""
    phi = ExponentFn(
        func=lambda y: log_sinhc(u * y).astype(complex),
        is_symmetric=True,
        label=f"log(tu/sinh tu), u={u:g}",
    )
    psi = ExponentFn(
        func=lambda y: (-coth_excess(u * y)).astype(complex),
        is_symmetric=True,
        label=f"-(tu coth tu - 1), u={u:g}",
    )
    return phi, psi


class AreaRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: float
    log_phi: float
    integral: float
    product_defect: float


class AreaReport(ReportModel):
    """Outcome of :func:`stochastic_area_identity`."""

    u: float
    rows: list[AreaRow]
    max_product_defect: float
    max_integral_error: float
    atol: float
    passed: bool


def stochastic_area_identity(
    u: float,
    t_grid: Sequence[float] = DEFAULT_T_GRID,
    tol: Tolerance = DEFAULT_TOLERANCE,
    atol: float = AREA_ATOL,
) -> AreaReport:
    """Check χ = φ·ψ and log φ = I(log ψ) under e^{-s} against ds on (0, ∞).

    Raises:
        PreconditionError: If u is not positive.
    """
    if not u > 0:
        raise PreconditionError(f"u must be positive, got {u}")
    t = np.asarray(t_grid, dtype=float)
    x = u * t
    with np.errstate(divide="ignore", invalid="ignore"):
        chi = np.where(x == 0, 1.0, x / np.sinh(x) * np.exp(-(x / np.tanh(x) - 1.0)))
    split = np.exp(log_sinhc(x)) * np.exp(-coth_excess(x))
    product_defect = np.abs(chi - split)

    phi, psi = area_exponents(u)
    integral = transform_exponent(class_l_map(), psi, tol)(t).real
    log_phi = phi(t).real
    error = np.abs(integral - log_phi)

    rows = [
        AreaRow(
            t=float(t[i]),
            log_phi=float(log_phi[i]),
            integral=float(integral[i]),
            product_defect=float(product_defect[i]),
        )
        for i in range(t.size)
    ]
    passed = bool(error.max() <= atol and product_defect.max() <= 1e-12)
    logger.debug("stochastic area at u=%g: max error %.2e", u, float(error.max()))
    return AreaReport(
        u=u,
        rows=rows,
        max_product_defect=float(product_defect.max()),
        max_integral_error=float(error.max()),
        atol=atol,
        passed=passed,
    )
