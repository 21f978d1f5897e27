"""Factorization of laws in the range of an integral map.

With λ = I′(ν) the identity I(λ) * λ = I(ν) holds whenever the images of h
and h′ coincide with their product image and the difference hρ - h′ρ′ is a
nonnegative measure. Both conditions and the identity itself are checked
here, the latter at the exponent level.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import NotInDomainError
from levicalc.kernels.mapping import IntegralMap, classify
from levicalc.measures.exponent import ExponentFn
from levicalc.measures.triple import LevyTriple, convolve, levy_exponent
from levicalc.numerics.grids import DEFAULT_Y_GRID
from levicalc.reporting.schema import ReportModel
from levicalc.transform.domain import domain_check
from levicalc.transform.exponent import transform_exponent
from levicalc.transform.triple import transform_triple

logger = logging.getLogger(__name__)

FACTORIZATION_ATOL = 1e-6
_TAIL_NODES = 96
_RANGE_SAMPLES = 4097
_LOWEST_LEVEL = 1e-6

FactorizationVerdict = Literal["holds", "condition_failed", "identity_failed"]


def image_interval(m: IntegralMap) -> tuple[float, float] | None:
    """Range of |h| over (a, b] as (c, d); None for the zero map."""
    if classify(m) == "zero":
        return None
    if m.h.monotone:
        ends = []
        for t in (m.a, m.b):
            ends.append(abs(float(m.h(t)) if math.isinf(t) else m.h_limit(t)))
        return min(ends), max(ends)
    hi = m.b if math.isfinite(m.b) else m.a + 1e3
    values = np.abs(m.h(np.linspace(m.a, hi, _RANGE_SAMPLES)[1:]))
    return float(np.nanmin(values)), float(np.nanmax(values))


def _same(first: tuple[float, float], second: tuple[float, float], rtol: float = 1e-9) -> bool:
    return all(
        (math.isinf(x) and math.isinf(y)) or abs(x - y) <= rtol * max(1.0, abs(x), abs(y))
        for x, y in zip(first, second, strict=True)
    )


def _image_tail(m: IntegralMap, w: float) -> float:
    return m.level_mass(w, upper=True) + m.level_mass(w, upper=False)


def tail_difference(
    mu_map: IntegralMap, prime_map: IntegralMap, levels: Sequence[float]
) -> np.ndarray:
    """D(w) = hρ{|x| > w} - h′ρ′{|x| > w} on the given levels."""
    return np.array([_image_tail(mu_map, w) - _image_tail(prime_map, w) for w in levels])


def _levels(interval: tuple[float, float]) -> np.ndarray:
    lo, hi = interval
    top = hi if math.isfinite(hi) else max(1e3, 1e3 * lo)
    bottom = lo if lo > 0 else _LOWEST_LEVEL * top
    return np.geomspace(bottom, top, _TAIL_NODES)


class ConditionReport(BaseModel):
    """The image and measure conditions on a pair of maps."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    mu_image: tuple[float, float] | None
    prime_image: tuple[float, float] | None
    image_condition: bool
    tail_condition: bool
    min_cell_mass: float | None = None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.image_condition and self.tail_condition


def factorization_conditions(
    mu_map: IntegralMap, prime_map: IntegralMap, atol: float = FACTORIZATION_ATOL
) -> ConditionReport:
    """Images h((a,b]) = h′((a′,b′]) = their product, and hρ - h′ρ′ ≥ 0.

    The measure condition is read on cells (w₁, w₂] of a log grid over the
    common image: every cell must get D(w₁) - D(w₂) ≥ -atol, and D ≥ -atol.
    """
    first, second = image_interval(mu_map), image_interval(prime_map)
    if first is None or second is None:
        return ConditionReport(
            mu_image=first,
            prime_image=second,
            image_condition=False,
            tail_condition=False,
            note="a zero map has no image interval",
        )
    product = (first[0] * second[0], first[1] * second[1])
    image_ok = _same(first, second) and _same(first, product)
    levels = _levels(first)
    difference = tail_difference(mu_map, prime_map, levels)
    cells = difference[:-1] - difference[1:]
    lowest = float(min(cells.min(), difference.min()))
    note = "" if image_ok else f"images {first} and {second} with product {product} differ"
    return ConditionReport(
        mu_image=first,
        prime_image=second,
        image_condition=image_ok,
        tail_condition=lowest >= -atol,
        min_cell_mass=lowest,
        note=note,
    )


class FactorizationReport(ReportModel):
    """Outcome of :func:`check_factorization`."""

    mu_map: str
    prime_map: str
    conditions: ConditionReport
    exponent_discrepancy: float
    route_discrepancy: float | None = None
    atol: float
    verdict: FactorizationVerdict

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


def _sup_gap(first: np.ndarray, second: np.ndarray) -> float:
    return float(np.max(np.abs(first - second)))


def _require_domain(m: IntegralMap, nu: LevyTriple, tol: Tolerance) -> None:
    report = domain_check(m, nu, tol)
    if not report.admitted:
        raise NotInDomainError(
            f"law is outside the domain of {m.label()} ({', '.join(report.failed())})",
            report=report,
        )


def check_factorization(
    mu_map: IntegralMap,
    prime_map: IntegralMap,
    nu: LevyTriple,
    y_grid: Sequence[float] = DEFAULT_Y_GRID,
    tol: Tolerance = DEFAULT_TOLERANCE,
    atol: float = FACTORIZATION_ATOL,
    *,
    triple_route: bool = False,
) -> FactorizationReport:
    """Verify I(λ) * λ = I(ν) with λ = I′(ν).

    The exponent route adds ∫Φ_λ(h_eff·y) dρ to Φ_λ. With ``triple_route``
    the same law is also built from triples (transform, then convolve) and
    its exponent compared with the exponent route.

    Raises:
        NotInDomainError: If ν is outside the domain of either map.
    """
    _require_domain(mu_map, nu, tol)
    _require_domain(prime_map, nu, tol)
    conditions = factorization_conditions(mu_map, prime_map, atol)

    y = np.asarray(y_grid, dtype=float)
    phi = nu.exponent(tol)
    lam: ExponentFn = transform_exponent(prime_map, phi, tol)
    left = transform_exponent(mu_map, lam, tol)(y) + lam(y)
    right = transform_exponent(mu_map, phi, tol)(y)
    discrepancy = _sup_gap(left, right)

    route = None
    if triple_route:
        lam_triple = transform_triple(prime_map, nu, tol)
        built = convolve(transform_triple(mu_map, lam_triple, tol), lam_triple)
        route = _sup_gap(levy_exponent(built, y, tol), left)

    if not conditions.holds:
        verdict: FactorizationVerdict = "condition_failed"
    elif discrepancy <= atol:
        verdict = "holds"
    else:
        verdict = "identity_failed"
    logger.info("factorization %s / %s: %s", mu_map.label(), prime_map.label(), verdict)
    return FactorizationReport(
        mu_map=mu_map.label(),
        prime_map=prime_map.label(),
        conditions=conditions,
        exponent_discrepancy=discrepancy,
        route_discrepancy=route,
        atol=atol,
        verdict=verdict,
    )
