"""Composition of integral maps through the image of the product clock measure.

The composition I^{h₁,r₁} ∘ … ∘ I^{h_m,r_m} is the single map I^{±w, hρ} where
hρ is the image of ρ₁ × … × ρ_m under (t₁, …, t_m) ↦ h₁(t₁)·…·h_m(t_m). The
image is described by its tail T(w) = hρ{|x| > w}, taken from the catalog
when the constituents match an entry and built by nested quadrature
otherwise.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats

from levicalc.compose.catalog import (
    CatalogEntry,
    canonical_map,
    entry_tail,
    fingerprint,
    get_entry,
    match,
)
from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import PreconditionError, TruncationWarning, UnsupportedError
from levicalc.kernels.clocks import lebesgue, tabulated
from levicalc.kernels.mapping import IntegralMap, RadialMeasure, classify, identity_map
from levicalc.kernels.transforms import const, linear
from levicalc.numerics.random import stream
from levicalc.transform.triple import write_tail_csv

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 1e-6
DEFAULT_NODES = 161
_FINITE_FLOOR = 1e-12
_TAIL_CUTOFF = 1e-14
_MAX_ROUNDS = 1000


@dataclass(frozen=True)
class _Factor:
    """One map seen as a factor of the product: |h| ranges over [lo, hi]."""

    map: IntegralMap
    sign: float
    lo: float
    hi: float
    mass: float
    point: float | None = None

    def tail(self, w: float) -> float:
        """ρ{|h| > w}."""
        if self.point is not None:
            return self.mass if self.point > w else 0.0
        if w >= self.hi:
            return 0.0
        m = self.map
        return m.level_mass(w, upper=True) + m.level_mass(w, upper=False)


@dataclass(frozen=True)
class _Tail:
    func: Callable[[float], float]
    lo: float
    hi: float
    mass: float


def _end_value(m: IntegralMap, t: float) -> float:
    value = float(m.h(t)) if math.isinf(t) else m.h_limit(t)
    return abs(value)


def _factor(m: IntegralMap) -> _Factor:
    """Sign, range and mass of one map.

    Raises:
        UnsupportedError: For opaque transforms and integrands that vanish or
            change sign inside (a, b].
    """
    if m.is_opaque:
        raise UnsupportedError(f"opaque transforms cannot be composed: {m.label()}")
    if m.zeros():
        raise UnsupportedError(
            f"{m.label()} vanishes inside (a, b]; its image is not an interval in (0, ∞)"
        )
    atoms = m.radial.atoms
    if atoms:
        u, weight = atoms[0]
        value = m.orientation * m.h_limit(u)
        return _Factor(m, math.copysign(1.0, value), abs(value), abs(value), weight, abs(value))
    if m.h.is_constant():
        value = m.orientation * m.h_limit(m.b)
        mass = m.radial.total_mass
        if not math.isfinite(mass):
            raise UnsupportedError(
                f"{m.label()} has a constant integrand against an infinite clock measure"
            )
        return _Factor(m, math.copysign(1.0, value), abs(value), abs(value), mass, abs(value))
    ends = sorted([_end_value(m, m.a), _end_value(m, m.b)])
    mid = 0.5 * (m.a + m.b) if math.isfinite(m.b) else m.a + 1.0
    sign = math.copysign(1.0, float(m.h_eff(mid)))
    return _Factor(m, sign, ends[0], ends[1], m.radial.total_mass)


def _nested(outer: _Factor, inner: _Tail, tol: Tolerance) -> _Tail:
    m = outer.map

    def func(w: float) -> float:
        breaks: set[float] = set()
        for level in (inner.lo, inner.hi):
            if 0 < level < math.inf:
                breaks.update(m.crossings(w / level))

        def integrand(t: float) -> float:
            x = abs(float(m.h(t)))
            if x == 0 or x * inner.hi <= w:
                return 0.0
            return inner.func(w / x)

        result = m.integrate(integrand, tol, breakpoints=sorted(breaks))
        if result.divergent:
            return math.inf
        return float(np.sum(result.value))

    mass = outer.mass * inner.mass
    return _Tail(func, outer.lo * inner.lo, outer.hi * inner.hi, mass)


def _single(f: _Factor) -> _Tail:
    return _Tail(f.tail, f.lo, f.hi, f.mass)


def _tail_nodes(tail: _Tail, window: float, n: int) -> np.ndarray:
    finite = math.isfinite(tail.mass)
    if tail.lo > 0:
        lo = tail.lo
    elif finite:
        lo = _FINITE_FLOOR * (tail.hi if math.isfinite(tail.hi) else 1.0)
    else:
        lo = window
    if math.isfinite(tail.hi):
        hi = tail.hi
    else:
        hi = max(1.0, 2.0 * lo)
        reference = tail.mass if finite else tail.func(lo)
        while tail.func(hi) > _TAIL_CUTOFF * reference and hi < 2.0**60:
            hi *= 2.0
    return np.geomspace(lo, hi, n)


def _tabulate(tail: _Tail, window: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes = _tail_nodes(tail, window, n)
    values = np.array([tail.func(float(w)) for w in nodes])
    if not np.all(np.isfinite(values)):
        raise UnsupportedError("image measure has infinite tails; the composition is not a clock")
    return nodes, np.minimum.accumulate(np.maximum(values, 0.0))


def _from_table(nodes: np.ndarray, values: np.ndarray, lo: float, hi: float, mass: float) -> _Tail:
    clock = tabulated(nodes, values)

    def func(w: float) -> float:
        if w >= hi:
            return 0.0
        return float(clock(max(w, float(nodes[0]))))

    return _Tail(func, lo, hi, mass)


def _fold(factors: list[_Factor], tol: Tolerance, window: float, n: int) -> _Tail:
    current = _single(factors[-1])
    for position, outer in enumerate(reversed(factors[:-1])):
        current = _nested(outer, current, tol)
        if position < len(factors) - 2:
            nodes, values = _tabulate(current, window, n)
            current = _from_table(nodes, values, current.lo, current.hi, current.mass)
    return current


def _prepare(maps: Sequence[IntegralMap]) -> list[_Factor] | None:
    """Factors of the non-identity maps; None when some map is the zero map."""
    factors = []
    for m in maps:
        kind = classify(m)
        if kind == "zero":
            return None
        if kind == "identity":
            continue
        factors.append(_factor(m))
    return factors


def _zero_map() -> IntegralMap:
    return IntegralMap(h=const(0.0), r=lebesgue(), a=0.0, b=1.0, allow_zero=True)


class PushforwardResult(BaseModel):
    """Image measure of a composition, with optional Monte Carlo samples."""

    model_config = ConfigDict(
        frozen=True, arbitrary_types_allowed=True, ser_json_inf_nan="strings"
    )

    image: IntegralMap = Field(description="Canonical single map I^{±w, hρ}")
    closed_form: str | None = None
    params: dict[str, float] = Field(default_factory=dict)
    finite: bool
    sign: float = 1.0
    point: float | None = Field(default=None, description="|h| of a composition of point factors")
    window: float | None = None
    level_tail: Callable[[float], float] | None = Field(
        default=None, exclude=True, description="Exact tail when a single factor is spread"
    )
    samples: np.ndarray | None = Field(default=None, exclude=True)
    seed: int | None = None
    ks_statistic: float | None = None
    ks_pvalue: float | None = None

    @property
    def image_measure(self) -> RadialMeasure:
        return self.image.radial

    @property
    def entry(self) -> CatalogEntry | None:
        return None if self.closed_form is None else get_entry(self.closed_form)

    def tail(self, w: float) -> float:
        """hρ{|x| > w} for w > 0."""
        if self.entry is not None:
            return entry_tail(self.entry, w, self.params)
        if self.point is not None:
            return self.image_measure.total_mass if self.point > w else 0.0
        if self.level_tail is not None:
            return self.level_tail(w)
        return self.image_measure.tail(w)

    def cdf(self, w: float) -> float:
        """Normalized cdf of |x| on (window, ∞), or on (0, ∞) for finite images."""
        if self.window is None:
            total = self.tail(0.0) if self.entry is not None else self.image_measure.total_mass
            return (total - self.tail(w)) / total if w > 0 else 0.0
        if w <= self.window:
            return 0.0
        base = self.tail(self.window)
        return (base - self.tail(w)) / base


def image_tail(
    maps: Sequence[IntegralMap],
    w: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
    *,
    canonical_order: bool = True,
) -> float:
    """(ρ₁ × … × ρ_m){|h₁ ⊗ … ⊗ h_m| > w} by nested quadrature.

    With ``canonical_order`` false the maps are nested in the given order,
    the innermost last.
    """
    factors = _prepare(maps)
    if factors is None:
        return 0.0
    if not factors:
        return 1.0 if w < 1 else 0.0
    if canonical_order:
        factors.sort(key=lambda f: fingerprint(f.map))
    points = [f for f in factors if f.point is not None]
    spread = [f for f in factors if f.point is None]
    scale = math.prod(f.point for f in points)
    weight = math.prod(f.mass for f in points)
    if not spread:
        return weight if scale > w else 0.0
    return weight * _fold(spread, tol, DEFAULT_WINDOW, DEFAULT_NODES).func(w / scale)


def identify(maps: Sequence[IntegralMap]) -> tuple[CatalogEntry, dict[str, float]] | None:
    """Catalog entry matching the non-identity maps, in any order."""
    factors = [m for m in maps if m.is_opaque or classify(m) != "identity"]
    return match(factors)


def pushforward(
    maps: Sequence[IntegralMap],
    tol: Tolerance = DEFAULT_TOLERANCE,
    *,
    window: float = DEFAULT_WINDOW,
    nodes: int = DEFAULT_NODES,
) -> PushforwardResult:
    """Image measure of the composition of ``maps`` (outermost first).

    Args:
        maps: Maps to compose; identity maps are dropped.
        tol: Quadrature tolerances for the nested construction.
        window: Lower end δ of the tabulated tail for infinite images.
        nodes: Log-spaced nodes of the tabulated tail.

    Returns:
        The canonical map together with its catalog id when one matched.

    Raises:
        UnsupportedError: For opaque maps and images that are not a subset
            of (0, ∞) in a single sign.
    """
    if not maps:
        raise PreconditionError("compose needs at least one map")
    factors = _prepare(maps)
    if factors is None:
        return PushforwardResult(image=_zero_map(), finite=True, point=0.0)
    if not factors:
        return PushforwardResult(image=identity_map(), finite=True, point=1.0)

    found = match([f.map for f in factors])
    if found is not None:
        entry, params = found
        image = canonical_map(entry, params)
        logger.info("composition matched catalog entry %s %s", entry.name, params)
        assert image is not None
        sign = math.prod(f.sign for f in factors)
        return PushforwardResult(
            image=image, closed_form=entry.name, params=params, finite=entry.finite, sign=sign
        )

    factors.sort(key=lambda f: fingerprint(f.map))
    sign = math.prod(f.sign for f in factors)
    points = [f for f in factors if f.point is not None]
    spread = [f for f in factors if f.point is None]
    scale = math.prod(f.point for f in points)
    weight = math.prod(f.mass for f in points)
    if not spread:
        image = IntegralMap(h=const(sign * scale), r=lebesgue(slope=weight), a=0.0, b=1.0)
        return PushforwardResult(image=image, finite=True, sign=sign, point=scale)

    logger.debug("composing %d maps by nested quadrature", len(spread))
    inner = _fold(spread, tol, window, nodes)
    tail = _Tail(
        lambda w: weight * inner.func(w / scale), inner.lo * scale, inner.hi * scale, weight * inner.mass
    )
    finite = math.isfinite(tail.mass)
    grid, values = _tabulate(tail, window, nodes)
    b = tail.hi if math.isfinite(tail.hi) else math.inf
    if finite:
        a = tail.lo
        image = IntegralMap(h=linear(sign), r=tabulated(grid, tail.mass - values), a=a, b=b)
    else:
        warnings.warn(
            f"infinite image measure tabulated on ({grid[0]:g}, {b:g}]",
            TruncationWarning,
            stacklevel=2,
        )
        image = IntegralMap(h=linear(-sign), r=tabulated(grid, values), a=float(grid[0]), b=b)
    exact = tail.func if len(spread) == 1 else None
    return PushforwardResult(image=image, finite=finite, sign=sign, level_tail=exact)


def compose(
    maps: Sequence[IntegralMap],
    tol: Tolerance = DEFAULT_TOLERANCE,
    *,
    window: float = DEFAULT_WINDOW,
    nodes: int = DEFAULT_NODES,
) -> IntegralMap:
    """The single map equal to the composition of ``maps`` (outermost first)."""
    return pushforward(maps, tol, window=window, nodes=nodes).image


# --- Monte Carlo ---------------------------------------------------------------------


def _windowed(f: _Factor, level: float) -> IntegralMap:
    """Restriction of a factor's map to {|h| > level}."""
    m = f.map
    if level <= 0:
        return m
    nodes = sorted({m.a, *m.crossings(level), m.b})
    keep = []
    for lo, hi in zip(nodes[:-1], nodes[1:], strict=True):
        mid = 0.5 * (lo + hi) if math.isfinite(hi) else lo + 1.0
        if abs(float(m.h(mid))) > level:
            keep.append((lo, hi))
    if not keep:
        raise PreconditionError(f"window leaves no mass for {m.label()}")
    return m.restricted(keep[0][0], keep[-1][1])


def _samplers(factors: list[_Factor], window: float | None) -> list[IntegralMap | None]:
    out: list[IntegralMap | None] = []
    for i, f in enumerate(factors):
        if f.point is not None:
            out.append(None)
            continue
        m = f.map
        if window is not None:
            others = math.prod(g.hi for j, g in enumerate(factors) if j != i)
            if math.isfinite(others):
                m = _windowed(f, window / others)
        mass = m.radial.total_mass
        if not math.isfinite(mass):
            raise PreconditionError(
                f"clock measure of {f.map.label()} has infinite mass; declare a finite-mass window"
            )
        out.append(m)
    return out


def image_density_mc(
    maps: Sequence[IntegralMap],
    n_samples: int,
    seed: int,
    *,
    window: float | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> PushforwardResult:
    """Sample the normalized image measure and test it against the analytic tail.

    Each ρ_i is sampled through its quantile function from the stream
    ``(seed, i, round)``; products with |x| ≤ ``window`` are rejected.

    Raises:
        PreconditionError: If some ρ_i has infinite mass and no window is set.
    """
    factors = _prepare(maps)
    if factors is None:
        raise PreconditionError("the zero map has no image measure to sample")
    if not factors:
        factors = [_factor(identity_map())]
    samplers = _samplers(factors, window)
    result = pushforward(maps, tol)

    collected: list[np.ndarray] = []
    have = 0
    for round_ in range(_MAX_ROUNDS):
        product = np.ones(n_samples)
        for i, (f, m) in enumerate(zip(factors, samplers, strict=True)):
            if m is None:
                product *= f.sign * f.point
                continue
            u = stream(seed, i, round_).random(n_samples)
            product *= m.h_eff(m.radial.quantile(u))
        if window is not None:
            product = product[np.abs(product) > window]
        collected.append(product)
        have += product.size
        if have >= n_samples:
            break
    else:
        raise PreconditionError(f"window {window} accepts too few samples")
    samples = np.concatenate(collected)[:n_samples]
    logger.info("drew %d image samples in %d rounds", n_samples, round_ + 1)

    result = result.model_copy(update={"window": window})
    ks = stats.kstest(np.abs(samples), np.vectorize(result.cdf))
    return result.model_copy(
        update={
            "samples": samples,
            "seed": seed,
            "ks_statistic": float(ks.statistic),
            "ks_pvalue": float(ks.pvalue),
        }
    )


def image_tail_table(result: PushforwardResult, w_grid: Sequence[float]) -> list[tuple[float, float]]:
    """Rows (w, tail_mass) of the image measure."""
    return [(float(w), result.tail(float(w))) for w in w_grid]


def write_image_tail_csv(result: PushforwardResult, w_grid: Sequence[float], path: Path) -> Path:
    return write_tail_csv(image_tail_table(result, w_grid), path, ("w", "tail_mass"))


def default_w_grid(result: PushforwardResult, n: int = 41) -> np.ndarray:
    """Log-spaced grid across the support of the image measure."""
    m = result.image
    lo = max(m.a, DEFAULT_WINDOW)
    hi = m.b if math.isfinite(m.b) else max(10.0, 10.0 * lo)
    if result.point is not None:
        lo, hi = 0.5 * max(result.point, DEFAULT_WINDOW), 2.0 * max(result.point, DEFAULT_WINDOW)
    return np.geomspace(lo, hi, n)
