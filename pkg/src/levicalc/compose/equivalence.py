"""Equivalence and commutativity of integral maps, decided at the exponent level."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from levicalc.compose.pushforward import compose
from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.kernels.clocks import exp_clock, lebesgue, log_clock, power_clock
from levicalc.kernels.mapping import IntegralMap
from levicalc.kernels.transforms import exp_decay, linear, neg_log, power
from levicalc.measures.exponent import ExponentFn
from levicalc.measures.triple import LevyTriple
from levicalc.numerics.grids import DEFAULT_Y_GRID
from levicalc.transform.exponent import transform_exponent

logger = logging.getLogger(__name__)

EQUIVALENCE_ATOL = 1e-6

Verdict = Literal["pointwise", "up_to_reflection", "not_equivalent"]


class EquivalenceReport(BaseModel):
    """Sup discrepancies between two transformed exponents over laws and grid."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    first: str
    second: str
    pointwise: float
    reflected: float
    atol: float
    verdict: Verdict

    @property
    def equivalent(self) -> bool:
        return self.verdict != "not_equivalent"


class CommutativityReport(BaseModel):
    """Both composition orders compared on a set of laws."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    first: str
    second: str
    discrepancy: float
    single_map: float | None = None
    atol: float
    commute: bool


def nested_exponent(
    maps: Sequence[IntegralMap], phi: ExponentFn, tol: Tolerance = DEFAULT_TOLERANCE
) -> ExponentFn:
    """Exponent of I₁ ∘ … ∘ I_m(ν): the innermost map acts first."""
    for m in reversed(maps):
        phi = transform_exponent(m, phi, tol)
    return phi


def _sup(values: list[np.ndarray]) -> float:
    return float(max(np.max(np.abs(v)) for v in values)) if values else 0.0


def equivalence_check(
    m1: IntegralMap,
    m2: IntegralMap,
    test_laws: Sequence[LevyTriple],
    y_grid: Sequence[float] = DEFAULT_Y_GRID,
    tol: Tolerance = DEFAULT_TOLERANCE,
    atol: float = EQUIVALENCE_ATOL,
) -> EquivalenceReport:
    """Compare I₁(ν) with I₂(ν) and with the reflection of I₂(ν).

    Two maps with the same action up to ν ↦ ν⁻ share domains and ranges, so
    both verdicts count as equivalent.

    Raises:
        NotInDomainError: If a test law is outside the domain of either map.
    """
    y = np.asarray(y_grid, dtype=float)
    direct, mirrored = [], []
    for law in test_laws:
        phi = law.exponent(tol)
        first = transform_exponent(m1, phi, tol)(y)
        second = transform_exponent(m2, phi, tol)
        direct.append(first - second(y))
        mirrored.append(first - second(-y))
    pointwise, reflected = _sup(direct), _sup(mirrored)
    if pointwise <= atol:
        verdict: Verdict = "pointwise"
    elif reflected <= atol:
        verdict = "up_to_reflection"
    else:
        verdict = "not_equivalent"
    logger.debug("equivalence %s vs %s: %s", m1.label(), m2.label(), verdict)
    return EquivalenceReport(
        first=m1.label(),
        second=m2.label(),
        pointwise=pointwise,
        reflected=reflected,
        atol=atol,
        verdict=verdict,
    )


def commutativity_check(
    m1: IntegralMap,
    m2: IntegralMap,
    test_laws: Sequence[LevyTriple],
    y_grid: Sequence[float] = DEFAULT_Y_GRID,
    tol: Tolerance = DEFAULT_TOLERANCE,
    atol: float = EQUIVALENCE_ATOL,
    *,
    against_composition: bool = False,
) -> CommutativityReport:
    """Compare I₁∘I₂(ν) with I₂∘I₁(ν) by nested quadrature.

    With ``against_composition`` the nested exponent is also compared with
    the exponent of the composed single map.
    """
    y = np.asarray(y_grid, dtype=float)
    swaps, singles = [], []
    single = compose([m1, m2], tol) if against_composition else None
    for law in test_laws:
        phi = law.exponent(tol)
        forward = nested_exponent([m1, m2], phi, tol)(y)
        backward = nested_exponent([m2, m1], phi, tol)(y)
        swaps.append(forward - backward)
        if single is not None:
            singles.append(forward - transform_exponent(single, phi, tol)(y))
    discrepancy = _sup(swaps)
    return CommutativityReport(
        first=m1.label(),
        second=m2.label(),
        discrepancy=discrepancy,
        single_map=_sup(singles) if single is not None else None,
        atol=atol,
        commute=discrepancy <= atol,
    )


@dataclass(frozen=True)
class EquivalentPair:
    """Two maps known to act alike, with the expected verdict."""

    name: str
    description: str
    build: Callable[[], tuple[IntegralMap, IntegralMap]]
    verdict: Verdict


def _class_l_pair() -> tuple[IntegralMap, IntegralMap]:
    return (
        IntegralMap(h=exp_decay(), r=lebesgue()),
        IntegralMap(h=linear(), r=log_clock(-1.0), b=1.0),
    )


def _power_pair(beta: float = 2.0) -> tuple[IntegralMap, IntegralMap]:
    return (
        IntegralMap(h=linear(), r=power_clock(beta), b=1.0),
        IntegralMap(h=power(1.0 / beta), r=lebesgue(), b=1.0),
    )


def _upsilon_pair() -> tuple[IntegralMap, IntegralMap]:
    return (
        IntegralMap(h=linear(), r=exp_clock(rate=1.0, coef=-1.0, offset=1.0)),
        IntegralMap(h=neg_log(), r=lebesgue(), b=1.0),
    )


# Pair registry
EQUIVALENT_PAIRS: dict[str, EquivalentPair] = {
    "class_l_neg_log": EquivalentPair(
        name="class_l_neg_log",
        description="e^{-t} against dt on (0,∞) and t against -log t on (0,1]",
        build=_class_l_pair,
        verdict="up_to_reflection",
    ),
    "power_pair": EquivalentPair(
        name="power_pair",
        description="t against t^β and t^{1/β} against dt on (0,1], β = 2",
        build=_power_pair,
        verdict="pointwise",
    ),
    "upsilon": EquivalentPair(
        name="upsilon",
        description="t against 1-e^{-t} on (0,∞) and -log t against dt on (0,1]",
        build=_upsilon_pair,
        verdict="pointwise",
    ),
}


def get_pair(name: str) -> EquivalentPair:
    """Get an equivalent pair by name.

    Raises:
        KeyError: If pair not found.
    """
    if name not in EQUIVALENT_PAIRS:
        available = ", ".join(EQUIVALENT_PAIRS.keys())
        msg = f"Unknown equivalent pair '{name}'. Available: {available}"
        raise KeyError(msg)
    return EQUIVALENT_PAIRS[name]
