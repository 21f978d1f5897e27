"""Incomplete gamma and exponential-integral evaluators.

``gamma0`` evaluates Γ(0; w) = E1(w) with the Euler-constant series for
small arguments and a continued fraction for large ones. The scipy routines
serve as the vectorized evaluators elsewhere.
"""

from __future__ import annotations

import math
import sys

import numpy as np
from scipy import special

EULER_GAMMA = 0.57721566490153286060651209008240243

_SERIES_LIMIT = 2.0


def _gamma0_series(w: float, accuracy: float = 1e-16, max_iteration: int = 500) -> float:
    # -Γ(0;w) = C + ln w + Σ_{k≥1} (-w)^k / (k·k!)
    terms = []
    term = 1.0
    for k in range(1, max_iteration + 1):
        term *= -w / k
        contribution = term / k
        terms.append(contribution)
        if abs(contribution) < accuracy * max(abs(math.fsum(terms)), 1e-300):
            break
    return -(EULER_GAMMA + math.log(w) + math.fsum(terms))


def _gamma0_continued_fraction(w: float, accuracy: float = 1e-15, max_iteration: int = 200) -> float:
    # Modified Lentz evaluation of E1(w) = e^{-w} / (w + 1 - 1/(w + 3 - 4/(w + 5 - ...)))
    tiny = sys.float_info.min / sys.float_info.epsilon
    b = w + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iteration + 1):
        an = -float(i * i)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < accuracy:
            return h * math.exp(-w)
    msg = f"continued fraction for Γ(0;{w}) did not converge"
    raise ArithmeticError(msg)


def gamma0(w: float) -> float:
    """Γ(0; w) = ∫_w^∞ e^{-s}/s ds for w > 0."""
    if w <= 0:
        return math.inf
    if w <= _SERIES_LIMIT:
        return _gamma0_series(w)
    return _gamma0_continued_fraction(w)


def incomplete_gamma(alpha: float, x: np.ndarray | float) -> np.ndarray:
    """Upper incomplete gamma Γ(α; x) = ∫_x^∞ t^{α-1} e^{-t} dt for any real α.

    Negative α uses Γ(α; x) = (Γ(α+1; x) − x^α e^{−x}) / α.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        steps = max(0, math.ceil(-alpha)) if alpha < 0 else 0
        top = alpha + steps
        if top == 0.0:
            value = special.exp1(x)
        else:
            value = special.gamma(top) * special.gammaincc(top, x)
        for k in range(steps):
            a = top - k - 1
            value = (value - np.power(x, a) * np.exp(-x)) / a
        value = np.where(x <= 0, math.gamma(alpha) if alpha > 0 else np.inf, value)
    return value
