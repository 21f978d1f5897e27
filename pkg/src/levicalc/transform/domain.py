"""Domain checks: does a law lie in the domain of an integral map?

Shortcuts settle the question outright when they apply (a finite clock with
bounded h, symmetric stable laws, laws with finite second moment). Otherwise
every applicable criterion is evaluated and the law is admitted only when all
of them pass.
"""

from __future__ import annotations

import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.kernels.mapping import IntegralMap, p_functional
from levicalc.measures.levy import ImageMeasure, ParametricMeasure, StableFamily
from levicalc.measures.triple import LevyTriple, tail_moment
from levicalc.reporting.schema import ReportModel

logger = logging.getLogger(__name__)

Verdict = Literal["pass", "fail"]

Shortcut = Literal["prop3_finite_clock", "prop5_second_moment", "prop6_stable"]


class DomainCheck(BaseModel):
    """One evaluated criterion."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    criterion: str
    value: float
    threshold: str
    verdict: Verdict
    note: str = ""


class DomainReport(ReportModel):
    """Outcome of :func:`domain_check`."""

    admitted: bool
    checks: list[DomainCheck]
    shortcut_used: Shortcut | None = None
    map: str = ""

    def failed(self) -> list[str]:
        return [c.criterion for c in self.checks if c.verdict == "fail"]


def _finite(criterion: str, value: float, note: str = "") -> DomainCheck:
    return DomainCheck(
        criterion=criterion,
        value=value,
        threshold="< inf",
        verdict="pass" if math.isfinite(value) else "fail",
        note=note,
    )


def log_moment_order(m: IntegralMap) -> float | None:
    """Order k of the log-moment condition ∫_{|x|>1} log^k|x| M(dx) < ∞ for maps of the log family.

    Recognized forms: h = e^{-t} against a linear or power clock on (0, ∞),
    h = t against -log t or (-log t)^m on (0, 1], and h = t against the
    Γ(0; t) clock.
    """
    h, r = m.h, m.r
    if h.kind == "exp" and math.isinf(m.b) and m.a == 0:
        if r.kind == "linear":
            return 1.0
        if r.kind == "power" and r.params.exponent > 0:
            return r.params.exponent
    if h.kind == "linear" and m.a == 0:
        if r.kind == "log" and m.b <= 1:
            return 1.0
        if r.kind == "log_power":
            return r.params.power
        if r.kind == "incomplete_gamma" and r.params.alpha == 0:
            return 1.0
    return None


def _stable_index(t: LevyTriple) -> float | None:
    levy = t.levy
    if t.shift == 0 and t.gaussian_var == 0 and isinstance(levy, ParametricMeasure):
        if isinstance(levy.family, StableFamily):
            return levy.family.index
    return None


def _abs_h_integral(m: IntegralMap, tol: Tolerance) -> float:
    return p_functional(m, 1.0, tol)


def _compensator_integral(m: IntegralMap, t: LevyTriple, tol: Tolerance) -> float:
    """∫ h_eff(t)·M.compensator_shift(|h(t)|) ρ(dt), ``nan`` when divergent."""
    levy = t.levy
    breaks = set(m.zeros())
    for radius in levy.radii():
        breaks.update(m.crossings(1.0 / radius))

    def integrand(s: float) -> float:
        h = float(m.h_eff(s))
        return 0.0 if h == 0 else h * levy.compensator_shift(abs(h), tol)

    result = m.integrate(integrand, tol, breakpoints=sorted(breaks))
    return float(np.sum(result.value)) if result.finite else math.nan


def domain_check(m: IntegralMap, t: LevyTriple, tol: Tolerance = DEFAULT_TOLERANCE) -> DomainReport:
    """Decide whether ν = [z, R, M] lies in the domain of I^{h,r}_{(a,b]}.

    Args:
        m: The integral map.
        t: The law's triple.
        tol: Quadrature tolerances.

    Returns:
        Report with every evaluated criterion and the shortcut used, if any.
    """
    label = m.label()
    checks: list[DomainCheck] = []

    # A finite clock with bounded h admits every law.
    clock_mass = m.radial.total_mass
    if math.isfinite(clock_mass) and math.isfinite(m.h_sup()):
        checks.append(
            DomainCheck(
                criterion="prop3_finite_clock",
                value=clock_mass,
                threshold="< inf",
                verdict="pass",
                note="finite clock mass and bounded h",
            )
        )
        return DomainReport(admitted=True, checks=checks, shortcut_used="prop3_finite_clock", map=label)

    index = _stable_index(t)
    if index is not None:
        check = _finite("prop6_stable", p_functional(m, index, tol), f"∫|h|^{index:g} dρ")
        return DomainReport(
            admitted=check.verdict == "pass", checks=[check], shortcut_used="prop6_stable", map=label
        )

    if t.is_degenerate() and t.shift == 0:
        return DomainReport(admitted=True, checks=[], map=label)

    second = tail_moment(t, "second", tol)
    if second.finite:
        first_abs = _abs_h_integral(m, tol)
        square = p_functional(m, 2.0, tol)
        if math.isfinite(first_abs) and math.isfinite(square):
            checks.append(
                DomainCheck(
                    criterion="prop5_second_moment",
                    value=second.value,
                    threshold="< inf",
                    verdict="pass",
                    note="finite second moment with ∫|h| dρ and ∫h² dρ finite",
                )
            )
            return DomainReport(
                admitted=True, checks=checks, shortcut_used="prop5_second_moment", map=label
            )

    if t.shift != 0:
        checks.append(_finite("prop4_shift", _abs_h_integral(m, tol), "∫|h| dρ"))
    if t.gaussian_var != 0:
        checks.append(_finite("prop4_gaussian", p_functional(m, 2.0, tol), "∫h² dρ"))
    if not t.levy.is_empty():
        necessary = m.integrate(
            lambda s: min(1.0, float(m.h(s)) ** 2), tol, breakpoints=m.crossings(1.0)
        )
        value = float(np.sum(necessary.value)) if not necessary.divergent else math.inf
        checks.append(_finite("cor2_necessary", value, "∫(1 ∧ h²) dρ"))

        order = log_moment_order(m)
        if order is not None:
            name = "log" if order == 1 else f"log^{order:g}"
            moment = tail_moment(t, name, tol)
            checks.append(_finite("example1_logmoment", moment.value, f"∫_{{|x|>1}} {name}|x| M(dx)"))

        if all(c.verdict == "pass" for c in checks):
            image = ImageMeasure(base=t.levy, mapping=m)
            checks.append(_finite("cor4_iii", image.mass_functional(1.0, tol), "∫∫(1 ∧ h²x²) M(dx) ρ(dt)"))
            if checks[-1].verdict == "pass":
                shift = _compensator_integral(m, t, tol)
                checks.append(
                    DomainCheck(
                        criterion="prop4_compensator",
                        value=shift,
                        threshold="converges",
                        verdict="pass" if math.isfinite(shift) else "fail",
                        note="∫ h·∫x[1_B(hx) - 1_B(x)] M(dx) dρ",
                    )
                )

    admitted = all(c.verdict == "pass" for c in checks)
    logger.debug("domain check for %s: admitted=%s", label, admitted)
    return DomainReport(admitted=admitted, checks=checks, map=label)
