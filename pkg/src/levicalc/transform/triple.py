"""Triple-level action of an integral map.

For ν = [z, R, M] the image I^{h,r}_{(a,b]}(ν) has

* shift ``z·∫h dρ + ∫ h(t)·∫ x[1_B(h(t)x) - 1_B(x)] M(dx) ρ(dt)``,
* Gaussian variance ``R·∫h² dρ``,
* Lévy measure ``A ↦ ∫∫ 1_A(h(t)x) M(dx) ρ(dt)``,

with h read through the map's orientation.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import NotInDomainError, QuadratureError
from levicalc.kernels.mapping import IntegralMap, classify, p_functional
from levicalc.measures.levy import (
    AtomicMeasure,
    ImageMeasure,
    LevyMeasure,
    ParametricMeasure,
    StableFamily,
    stable_measure,
)
from levicalc.measures.triple import LevyTriple, convolution_power, dilate
from levicalc.reporting.export import write_csv
from levicalc.transform.domain import domain_check

logger = logging.getLogger(__name__)


def _signed_h_integral(m: IntegralMap, tol: Tolerance) -> float:
    result = m.integrate(lambda t: float(m.h_eff(t)), tol, breakpoints=m.zeros())
    if not result.finite:
        raise QuadratureError(f"∫h dρ does not converge for {m.label()}", abserr=result.abserr)
    return float(np.sum(result.value))


def _compensator_term(m: IntegralMap, levy: LevyMeasure, tol: Tolerance) -> float:
    if levy.is_empty() or levy.is_symmetric():
        return 0.0
    breaks = set(m.zeros())
    for radius in levy.radii():
        breaks.update(m.crossings(1.0 / radius))

    def integrand(t: float) -> float:
        h = float(m.h_eff(t))
        return 0.0 if h == 0 else h * levy.compensator_shift(abs(h), tol)

    result = m.integrate(integrand, tol, breakpoints=sorted(breaks))
    if not result.finite:
        raise QuadratureError(
            f"compensator shift does not converge for {m.label()}", abserr=result.abserr
        )
    return float(np.sum(result.value))


def image_levy_measure(m: IntegralMap, levy: LevyMeasure, tol: Tolerance = DEFAULT_TOLERANCE) -> LevyMeasure:
    """The pushforward M^{h,r}; symmetric stable measures stay in closed form."""
    if levy.is_empty():
        return AtomicMeasure()
    if isinstance(levy, ParametricMeasure) and isinstance(levy.family, StableFamily):
        f = levy.family
        return stable_measure(f.index, f.coef * p_functional(m, f.index, tol))
    return ImageMeasure(base=levy, mapping=m)


def transform_triple(
    m: IntegralMap,
    t: LevyTriple,
    tol: Tolerance = DEFAULT_TOLERANCE,
    *,
    check_domain: bool = True,
) -> LevyTriple:
    """Triple of I^{h,r}_{(a,b]}(ν).

    Args:
        m: The integral map.
        t: Triple of ν.
        tol: Quadrature tolerances.
        check_domain: Run :func:`domain_check` first.

    Returns:
        The transformed triple. Identity maps return ``t`` itself and zero
        maps return δ₀.

    Raises:
        NotInDomainError: If ν is outside the domain, or the pushforward fails
            the Lévy-measure mass test.
    """
    kind = classify(m)
    if kind == "identity":
        return t
    if kind == "zero":
        return LevyTriple()
    if check_domain:
        report = domain_check(m, t, tol)
        if not report.admitted:
            failed = ", ".join(report.failed()) or "domain"
            raise NotInDomainError(f"law is outside the domain of {m.label()} ({failed})", report=report)

    atoms = m.radial.atoms
    if atoms:
        # A clock jump of size w at u runs ν for w units of time, scaled by h(u).
        u, mass = atoms[0]
        scaled = dilate(t, m.orientation * m.h_limit(u), tol)
        return scaled if mass == 1.0 else convolution_power(scaled, mass)

    shift = 0.0
    if t.shift != 0:
        shift += t.shift * _signed_h_integral(m, tol)
    shift += _compensator_term(m, t.levy, tol)
    gaussian = t.gaussian_var * p_functional(m, 2.0, tol) if t.gaussian_var else 0.0
    levy = image_levy_measure(m, t.levy, tol)

    if not math.isfinite(levy.mass_functional(1.0, tol)):
        raise NotInDomainError(f"pushforward under {m.label()} is not a Lévy measure (∫(1 ∧ x²) diverges)")
    logger.debug("transformed triple under %s: shift=%g, gaussian=%g", m.label(), shift, gaussian)
    return LevyTriple(shift=shift, gaussian_var=gaussian, levy=levy)


def tail_table(levy: LevyMeasure, w_grid: Sequence[float], tol: Tolerance = DEFAULT_TOLERANCE) -> list[tuple[float, float, float]]:
    """Rows (w, M(x > w), M(x < -w)) on a grid of w > 0."""
    return [(float(w), levy.upper_tail(w, tol), levy.lower_tail(w, tol)) for w in w_grid]


def write_tail_csv(
    rows: Sequence[tuple[float, ...]], path: Path, header: Sequence[str] = ("w", "upper", "lower")
) -> Path:
    return write_csv(rows, path, header)


def separating_level(
    m: IntegralMap,
    first: LevyMeasure,
    second: LevyMeasure,
    v_grid: Sequence[float],
    tol: Tolerance = DEFAULT_TOLERANCE,
    atol: float = 1e-9,
) -> float | None:
    """First v whose upper or lower image tails differ, or None.

    Distinct measures with finite clocks always leave a separating level on a
    fine enough grid, since the map is injective.
    """
    a, b = ImageMeasure(base=first, mapping=m), ImageMeasure(base=second, mapping=m)
    for v in v_grid:
        if abs(a.upper_tail(v, tol) - b.upper_tail(v, tol)) > atol:
            return float(v)
        if abs(a.lower_tail(v, tol) - b.lower_tail(v, tol)) > atol:
            return float(v)
    return None
