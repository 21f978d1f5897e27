"""Adaptive quadrature with an operational divergence test.

Finite pieces are integrated with ``scipy.integrate.quad_vec`` (adaptive
Gauss-Kronrod bisection with an embedded error estimate), so one call can
integrate a whole y-grid at once. Improper ends are handled as limits:

* an infinite upper end is truncated at ``b_k = a + 2**k`` and the pieces
  ``(a + 2**(k-1), a + 2**k]`` are accumulated;
* a finite end where the first attempt fails (a singular clock density, a
  log singularity) is approached dyadically.

A schedule is settled when three consecutive pieces contribute less than the
tolerance. It is declared divergent when, after the burn-in, three
consecutive pieces each exceed the tolerance without decaying. A schedule that
runs out of pieces is closed by a geometric tail when the pieces shrink by a
steady ratio, and is otherwise reported as unconverged.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad_vec

from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import QuadratureError

logger = logging.getLogger(__name__)

Integrand = Callable[[float], "float | np.ndarray"]

# Ratio above which consecutive pieces count as not decaying.
_NO_DECAY = 0.999

# Relative spread of consecutive piece ratios below which a tail counts as geometric.
_GEOMETRIC_SPREAD = 1e-5


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of an integral over a possibly improper interval."""

    value: float | np.ndarray
    abserr: float
    converged: bool
    divergent: bool = False
    pieces: int = 1

    @property
    def finite(self) -> bool:
        return self.converged and not self.divergent


def _norm(value: float | np.ndarray) -> float:
    return float(np.max(np.abs(value))) if np.size(value) else 0.0


def _piece(func: Integrand, lo: float, hi: float, tol: Tolerance) -> tuple[np.ndarray, float, bool]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        with np.errstate(all="ignore"):
            value, err, info = quad_vec(
                func,
                lo,
                hi,
                epsabs=tol.epsabs,
                epsrel=tol.epsrel,
                limit=tol.limit,
                full_output=True,
            )
    ok = info.status == 0 and bool(np.all(np.isfinite(value)))
    return np.asarray(value, dtype=float), float(err), ok


def _accumulate(
    func: Integrand,
    edges: Iterator[tuple[float, float]],
    tol: Tolerance,
    label: str,
) -> QuadratureResult:
    total: np.ndarray | float = 0.0
    abserr = 0.0
    history: list[float] = []
    last: np.ndarray | float = 0.0
    for k, (lo, hi) in enumerate(edges):
        value, err, ok = _piece(func, lo, hi, tol)
        if not np.all(np.isfinite(value)):
            logger.debug("%s: non-finite piece on (%g, %g]", label, lo, hi)
            return QuadratureResult(total, math.inf, converged=False, divergent=True, pieces=k + 1)
        last = value
        total = total + value
        abserr += err
        history.append(_norm(value))
        threshold = tol.epsabs + tol.epsrel * _norm(total)
        recent = history[-3:]
        if len(recent) < 3:
            continue
        if all(size <= threshold for size in recent):
            return QuadratureResult(total, abserr, converged=True, pieces=k + 1)
        growing = recent[1] >= _NO_DECAY * recent[0] and recent[2] >= _NO_DECAY * recent[1]
        if k >= tol.burn_in and growing and all(size > threshold for size in recent):
            logger.debug("%s: growth test fired after %d pieces", label, k + 1)
            return QuadratureResult(total, abserr, converged=False, divergent=True, pieces=k + 1)
    return _exhausted(total, last, abserr, history, label)


def _exhausted(
    total: np.ndarray | float,
    last: np.ndarray | float,
    abserr: float,
    history: list[float],
    label: str,
) -> QuadratureResult:
    """Settle a schedule that ran out of pieces.

    Pieces shrinking by a steady ratio q < 1 leave a tail of last·q/(1-q).
    Pieces that stop shrinking mean divergence. Anything else is unconverged.
    """
    n = len(history)
    ratios = [b / a for a, b in zip(history[-5:-1], history[-4:], strict=True) if a > 0]
    if len(ratios) == 4 and min(ratios) >= _NO_DECAY:
        logger.debug("%s: schedule exhausted without decay", label)
        return QuadratureResult(total, abserr, converged=False, divergent=True, pieces=n)
    if len(ratios) == 4 and max(ratios) < 1.0:
        q = ratios[-1]
        spread = max(ratios) - min(ratios)
        if spread <= _GEOMETRIC_SPREAD * q:
            logger.debug("%s: extrapolated a geometric tail with ratio %.6f", label, q)
            tail_err = history[-1] * spread / (1.0 - q) ** 2
            return QuadratureResult(
                total + last * (q / (1.0 - q)), abserr + tail_err, converged=True, pieces=n
            )
    logger.debug("%s: schedule exhausted after %d pieces", label, n)
    tail_err = history[-1] if history else 0.0
    return QuadratureResult(total, abserr + tail_err, converged=False, pieces=n)


def _doubling_edges(a: float, start: float, count: int) -> Iterator[tuple[float, float]]:
    """Pieces (a + 2**(k-1), a + 2**k] beyond ``start``."""
    k = max(1, math.ceil(math.log2(max(start - a, 1.0))) + 1)
    lo = start
    for _ in range(count):
        hi = a + 2.0**k
        if hi > lo:
            yield lo, hi
            lo = hi
        k += 1


def _dyadic_edges(end: float, other: float, count: int) -> Iterator[tuple[float, float]]:
    """Pieces shrinking toward ``end`` from ``other``."""
    width = other - end
    for k in range(count):
        near = end + width / 2.0 ** (k + 1)
        far = end + width / 2.0**k
        if near == far:
            return
        yield (near, far) if near < far else (far, near)


def _combine(results: Sequence[QuadratureResult]) -> QuadratureResult:
    value: np.ndarray | float = 0.0
    for r in results:
        value = value + r.value
    return QuadratureResult(
        value,
        sum(r.abserr for r in results),
        converged=all(r.converged for r in results),
        divergent=any(r.divergent for r in results),
        pieces=sum(r.pieces for r in results),
    )


def _finite(func: Integrand, lo: float, hi: float, tol: Tolerance) -> QuadratureResult:
    value, err, ok = _piece(func, lo, hi, tol)
    if ok:
        return QuadratureResult(value, err, converged=True)
    logger.debug("refining (%g, %g] dyadically toward both ends", lo, hi)
    mid = 0.5 * (lo + hi)
    left = _accumulate(func, _dyadic_edges(lo, mid, tol.max_doublings), tol, f"({lo:g}+")
    right = _accumulate(func, _dyadic_edges(hi, mid, tol.max_doublings), tol, f"{hi:g}-)")
    return _combine([left, right])


def _to_infinity(func: Integrand, a: float, lo: float, tol: Tolerance) -> QuadratureResult:
    head = _finite(func, lo, max(lo + 1.0, a + 1.0), tol)
    start = max(lo + 1.0, a + 1.0)
    tail = _accumulate(func, _doubling_edges(a, start, tol.max_doublings), tol, f"({start:g}, inf)")
    return _combine([head, tail])


def integrate(
    func: Integrand,
    a: float,
    b: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
    *,
    breakpoints: Sequence[float] = (),
) -> QuadratureResult:
    """Integrate a real (scalar or vector valued) function over (a, b].

    Args:
        func: Integrand evaluated at a single point.
        a: Lower end.
        b: Upper end, possibly ``inf``.
        tol: Tolerances and doubling schedule.
        breakpoints: Points inside (a, b) where the integrand may jump.

    Returns:
        Result with value, error estimate and convergence flags.
    """
    if not b > a:
        return QuadratureResult(0.0, 0.0, converged=True, pieces=0)
    inner = sorted({float(p) for p in breakpoints if a < p < b})
    nodes = [a, *inner, b]
    parts: list[QuadratureResult] = []
    for lo, hi in zip(nodes[:-1], nodes[1:], strict=True):
        if math.isinf(hi):
            parts.append(_to_infinity(func, a, lo, tol))
        else:
            parts.append(_finite(func, lo, hi, tol))
    return _combine(parts)


def integrate_complex(
    func: Callable[[float], np.ndarray],
    a: float,
    b: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
    *,
    breakpoints: Sequence[float] = (),
) -> QuadratureResult:
    """Integrate a complex vector-valued function, real and imaginary parts separately."""
    size: list[int] = []

    def stacked(t: float) -> np.ndarray:
        v = np.atleast_1d(np.asarray(func(t), dtype=complex))
        if not size:
            size.append(v.size)
        return np.concatenate([v.real, v.imag])

    result = integrate(stacked, a, b, tol, breakpoints=breakpoints)
    flat = np.atleast_1d(np.asarray(result.value, dtype=float))
    n = size[0] if size else 1
    if flat.size != 2 * n:
        flat = np.zeros(2 * n)
    value = flat[:n] + 1j * flat[n:]
    return QuadratureResult(
        value, result.abserr, result.converged, result.divergent, result.pieces
    )


def settled_value(result: QuadratureResult, what: str) -> float:
    """Scalar value of a nonnegative integral; ``inf`` when the divergence test fired.

    Raises:
        QuadratureError: If the schedule neither settled nor diverged.
    """
    if result.divergent:
        return math.inf
    if not result.converged:
        raise QuadratureError(f"{what} did not settle", abserr=result.abserr)
    return float(np.sum(result.value))


def positive_integral(
    func: Integrand,
    a: float,
    b: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
    *,
    breakpoints: Sequence[float] = (),
) -> float:
    """Integral of a nonnegative function; ``inf`` when the divergence test fires.

    Raises:
        QuadratureError: If the integral neither settles nor diverges.
    """
    result = integrate(func, a, b, tol, breakpoints=breakpoints)
    return settled_value(result, f"integral over ({a:g}, {b:g}]")


def require_converged(result: QuadratureResult, tol: Tolerance, what: str) -> None:
    """Raise QuadratureError when the error estimate is far above tolerance.

    Raises:
        QuadratureError: If the achieved error is more than 1000x the target.
    """
    target = tol.epsabs + tol.epsrel * _norm(result.value)
    if result.abserr > 1e3 * target * max(result.pieces, 1):
        raise QuadratureError(f"{what} did not reach the requested tolerance", abserr=result.abserr)
