"""Exponent-level action of an integral map: Φ ↦ ∫ Φ(h_eff(t)·y) ρ(dt)."""

from __future__ import annotations

import logging

import numpy as np

from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import NotInDomainError
from levicalc.kernels.mapping import IntegralMap
from levicalc.measures.exponent import ExponentFn
from levicalc.numerics.quadrature import require_converged

logger = logging.getLogger(__name__)


def _evaluate(m: IntegralMap, phi: ExponentFn, y: np.ndarray, tol: Tolerance) -> np.ndarray:
    result = m.integrate(
        lambda t: phi.func(float(m.h_eff(t)) * y),
        tol,
        breakpoints=m.zeros(),
        complex_valued=True,
    )
    if result.divergent:
        offending = float(y[np.argmax(np.abs(y))])
        raise NotInDomainError(
            f"transformed exponent diverges at y={offending:g} for {m.label()}", y=offending
        )
    require_converged(result, tol, f"transformed exponent for {m.label()}")
    return np.asarray(result.value, dtype=complex)


def transform_exponent(
    m: IntegralMap, phi: ExponentFn, tol: Tolerance = DEFAULT_TOLERANCE
) -> ExponentFn:
    """The exponent of I^{h,r}_{(a,b]}(ν) given the exponent Φ of ν.

    A nondecreasing clock integrates Φ(h(t)y) dr(t); a nonincreasing clock
    integrates Φ(-h(t)y) |dr(t)|. Both cases read h through the map's
    orientation.

    Raises:
        NotInDomainError: When evaluated at a y where the integral diverges.
        QuadratureError: When quadrature misses the tolerance.
    """

    def func(y: np.ndarray) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.all(y == 0):
            return np.zeros_like(y, dtype=complex)
        try:
            return _evaluate(m, phi, y, tol)
        except NotInDomainError:
            # Pointwise evaluation pins down the offending y.
            if y.size == 1:
                raise
            logger.debug("retrying %d grid points one by one", y.size)
            return np.concatenate([_evaluate(m, phi, np.array([p]), tol) for p in y])

    return ExponentFn(
        func=func,
        is_symmetric=phi.is_symmetric,
        stable_index=phi.stable_index,
        label=f"{m.label()}({phi.label})",
    )
