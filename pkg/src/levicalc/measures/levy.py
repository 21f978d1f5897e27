"""Lévy measure representations.

Every representation answers the same questions, all with respect to the
closed unit ball B = {|x| ≤ 1}:

* ``lk(y, s)``: ∫ (e^{iysx} - 1 - iysx·1_B(sx)) M(dx), the jump part of the
  exponent of the law dilated by s;
* ``mass_functional(η)``: ∫ (1 ∧ η²x²) M(dx);
* ``compensator_shift(η)``: ∫ x [1_B(ηx) - 1_B(x)] M(dx), the shift picked up
  when the compensator is moved from B to B/η;
* ``moment_outside(g, η)``: ∫_{|ηx|>1} g(|ηx|) M(dx) for g ≥ 0;
* ``upper_tail(v)`` and ``lower_tail(v)``: M(x > v) and M(x < -v).

Divergent integrals are reported as ``inf``.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import special

from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import QuadratureError
from levicalc.kernels.mapping import IntegralMap
from levicalc.numerics.quadrature import (
    integrate,
    integrate_complex,
    positive_integral,
    settled_value,
)

Radial = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Growth:
    """Radial weight g(r) = r^power·(log r)^log_power for r > 1.

    ``log_at(s)`` is log g(e^s), so tail integrals can follow g far beyond
    the float range of e^s.
    """

    power: float = 0.0
    log_power: float = 0.0

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            value = np.power(r, self.power)
            if self.log_power:
                value = value * np.power(np.log(r), self.log_power)
        return value

    def log_at(self, s: float) -> float:
        value = self.power * s
        if self.log_power:
            if s <= 0:
                return -math.inf if self.log_power > 0 else math.inf
            value += self.log_power * math.log(s)
        return value


# Below this |θ| the odd part sin θ - θ is taken from its Taylor series.
_SERIES_THETA = 1e-3

# Largest u with e^u comfortably inside the float range.
_MAX_LOG_RADIUS = 700.0


def levy_kernel(theta: np.ndarray, inside: np.ndarray | bool) -> np.ndarray:
    """e^{iθ} - 1 - iθ·inside, evaluated without cancellation near θ = 0."""
    theta = np.asarray(theta, dtype=float)
    real = -2.0 * np.sin(0.5 * theta) ** 2
    small = np.abs(theta) < _SERIES_THETA
    odd = np.where(small, -(theta**3) / 6.0 + theta**5 / 120.0, np.sin(theta) - theta)
    imag = np.where(inside, odd, np.sin(theta))
    return real + 1j * imag


def _grid(y: np.ndarray | float) -> np.ndarray:
    return np.atleast_1d(np.asarray(y, dtype=float))


class _Measure(BaseModel):
    model_config = ConfigDict(frozen=True)

    def is_empty(self) -> bool:
        raise NotImplementedError

    def is_symmetric(self) -> bool:
        raise NotImplementedError

    def lk(self, y: np.ndarray, scale: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
        raise NotImplementedError

    def mass_functional(self, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        raise NotImplementedError

    def compensator_shift(self, eta: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        raise NotImplementedError

    def moment_outside(self, g: Radial, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        raise NotImplementedError

    def upper_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        raise NotImplementedError

    def lower_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        raise NotImplementedError

    def radii(self) -> tuple[float, ...]:
        """Jump sizes |x| of point masses, where the compensator is discontinuous."""
        return ()

    def scaled(self, c: float) -> LevyMeasure:
        """c·M."""
        raise NotImplementedError

    def dilated(self, u: float) -> LevyMeasure:
        """M∘(u·)^{-1}, the Lévy measure of the law of uX."""
        raise NotImplementedError

    def total_mass(self, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        """M(ℝ \\ {0})."""
        return self.upper_tail(0.0, tol) + self.lower_tail(0.0, tol)


# --- atoms -------------------------------------------------------------------------


class Atom(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    mass: float = Field(gt=0)

    @model_validator(mode="after")
    def _off_origin(self) -> Atom:
        if self.x == 0 or not math.isfinite(self.x) or not math.isfinite(self.mass):
            msg = f"atom at {self.x} with mass {self.mass} is not allowed"
            raise ValueError(msg)
        return self


class AtomicMeasure(_Measure):
    """Σ m_i δ_{x_i}, finitely many atoms away from 0."""

    kind: Literal["atomic"] = "atomic"
    atoms: tuple[Atom, ...] = ()

    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array([a.x for a in self.atoms], dtype=float),
            np.array([a.mass for a in self.atoms], dtype=float),
        )

    def is_empty(self) -> bool:
        return not self.atoms

    def is_symmetric(self) -> bool:
        x, m = self._arrays()
        order, mirror = np.lexsort((m, x)), np.lexsort((m, -x))
        return bool(np.allclose(x[order], -x[mirror], rtol=1e-12) and np.allclose(m[order], m[mirror]))

    def lk(self, y: np.ndarray, scale: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
        y = _grid(y)
        if self.is_empty() or scale == 0:
            return np.zeros_like(y, dtype=complex)
        x, m = self._arrays()
        sx = scale * x
        theta = y[:, None] * sx[None, :]
        return levy_kernel(theta, np.abs(sx) <= 1.0) @ m

    def mass_functional(self, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        x, m = self._arrays()
        return float(np.sum(m * np.minimum(1.0, (eta * x) ** 2)))

    def compensator_shift(self, eta: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        x, m = self._arrays()
        moved = (np.abs(eta * x) <= 1.0).astype(float) - (np.abs(x) <= 1.0)
        return float(np.sum(m * x * moved))

    def moment_outside(self, g: Radial, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        x, m = self._arrays()
        r = np.abs(eta * x)
        outside = r > 1.0
        if not np.any(outside):
            return 0.0
        return float(np.sum(m[outside] * g(r[outside])))

    def upper_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        x, m = self._arrays()
        return float(np.sum(m[x > v]))

    def lower_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        x, m = self._arrays()
        return float(np.sum(m[x < -v]))

    def radii(self) -> tuple[float, ...]:
        return tuple(sorted({abs(a.x) for a in self.atoms}))

    def scaled(self, c: float) -> AtomicMeasure:
        if c == 0:
            return AtomicMeasure()
        return AtomicMeasure(atoms=tuple(Atom(x=a.x, mass=a.mass * c) for a in self.atoms))

    def dilated(self, u: float) -> AtomicMeasure:
        if u == 0:
            return AtomicMeasure()
        return AtomicMeasure(atoms=tuple(Atom(x=a.x * u, mass=a.mass) for a in self.atoms))

    def merged(self, other: AtomicMeasure) -> AtomicMeasure:
        masses: dict[float, float] = {}
        for a in (*self.atoms, *other.atoms):
            masses[a.x] = masses.get(a.x, 0.0) + a.mass
        return AtomicMeasure(atoms=tuple(Atom(x=x, mass=m) for x, m in sorted(masses.items())))


# --- densities ------------------------------------------------------------------------


class DensityPiece(BaseModel):
    """coef·|x/d|^{-power}·e^{-rate|x/d|}·|log|x/d||^{log_power}/d on side·(lo, hi].

    ``dilation`` d = 1 gives the plain piece; other values keep the family
    closed under dilation.
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    lo: float = Field(default=0.0, ge=0)
    hi: float = math.inf
    coef: float = Field(gt=0)
    power: float = 0.0
    rate: float = Field(default=0.0, ge=0)
    log_power: float = 0.0
    side: Literal[1, -1] = 1
    dilation: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _check(self) -> DensityPiece:
        if not self.hi > self.lo:
            msg = f"density piece needs lo < hi, got ({self.lo}, {self.hi}]"
            raise ValueError(msg)
        d = self.dilation
        if self.log_power != 0 and self.lo < d < self.hi:
            msg = "a log-power piece may not straddle |x| = dilation"
            raise ValueError(msg)
        return self

    def density(self, r: np.ndarray | float) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        u = r / self.dilation
        with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
            value = self.coef * np.power(u, -self.power) * np.exp(-self.rate * u) / self.dilation
            if self.log_power:
                value = value * np.power(np.abs(np.log(u)), self.log_power)
        return np.where((r > self.lo) & (r <= self.hi), value, 0.0)

    def log_weight(self, u: float) -> float:
        """log of density(e^u)·e^u, finite far beyond the float range of e^u."""
        lo_u = math.log(self.lo) if self.lo > 0 else -math.inf
        if not lo_u < u <= math.log(self.hi):
            return -math.inf
        s = u - math.log(self.dilation)
        value = math.log(self.coef) + u - math.log(self.dilation) - self.power * s
        if self.rate:
            if s > _MAX_LOG_RADIUS:
                return -math.inf
            value -= self.rate * math.exp(s)
        if self.log_power:
            if s == 0:
                return math.inf if self.log_power < 0 else -math.inf
            value += self.log_power * math.log(abs(s))
        return value

    def integral(
        self,
        f: Radial,
        lo: float,
        hi: float,
        tol: Tolerance,
        breakpoints=(),
        *,
        log_f: Callable[[float], float] | None = None,
    ) -> float:
        """∫_{(lo,hi] ∩ piece} f(r) density(r) dr, ``inf`` when divergent.

        ``log_f(u)`` = log f(e^u) lets an unbounded f be followed in the tail;
        without it f must be bounded beyond e^700, where it is read at e^700.

        Raises:
            QuadratureError: If a piece neither settles nor diverges.
        """
        lo, hi = max(lo, self.lo), min(hi, self.hi)
        if not hi > lo:
            return 0.0

        def integrand(r: float) -> float:
            return float(f(np.asarray(r)) * self.density(r))

        def log_integrand(u: float) -> float:
            weight = self.log_weight(u)
            if weight == -math.inf:
                return 0.0
            if log_f is not None:
                total = log_f(u) + weight
                return math.inf if total > _MAX_LOG_RADIUS else math.exp(total)
            return float(f(np.asarray(math.exp(min(u, _MAX_LOG_RADIUS))))) * math.exp(weight)

        breaks = [p for p in breakpoints if lo < p < hi]
        if self.log_power:
            breaks.append(self.dilation)
        # Unbounded tails are integrated in log r, where log-corrected tails decay geometrically.
        knee = max(lo, 1.0, *breaks) if math.isinf(hi) else hi
        head = integrate(integrand, lo, knee, tol, breakpoints=breaks)
        tail = integrate(log_integrand, math.log(knee), math.inf, tol) if math.isinf(hi) else None
        value = settled_value(head, "density piece integral")
        if tail is not None:
            value += settled_value(tail, "density piece tail")
        return value

    def dilated(self, u: float) -> DensityPiece:
        k = abs(u)
        return self.model_copy(
            update={
                "lo": self.lo * k,
                "hi": self.hi * k,
                "dilation": self.dilation * k,
                "side": self.side if u > 0 else -self.side,
            }
        )


class DensityMeasure(_Measure):
    """Sum of radial density pieces."""

    kind: Literal["density"] = "density"
    pieces: tuple[DensityPiece, ...] = ()

    @model_validator(mode="after")
    def _levy_condition(self) -> DensityMeasure:
        if self.pieces and not math.isfinite(self.mass_functional(1.0)):
            msg = "∫ (1 ∧ x²) M(dx) diverges; not a Lévy measure"
            raise ValueError(msg)
        return self

    def is_empty(self) -> bool:
        return not self.pieces

    def is_symmetric(self) -> bool:
        def key(p: DensityPiece) -> tuple:
            return (p.lo, p.hi, p.coef, p.power, p.rate, p.log_power, p.dilation)

        plus = sorted(key(p) for p in self.pieces if p.side == 1)
        minus = sorted(key(p) for p in self.pieces if p.side == -1)
        return plus == minus

    def lk(self, y: np.ndarray, scale: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
        y = _grid(y)
        total = np.zeros_like(y, dtype=complex)
        if scale == 0:
            return total
        cut = 1.0 / abs(scale)
        for piece in self.pieces:
            signed = scale * piece.side

            def integrand(r: float, piece: DensityPiece = piece, signed: float = signed) -> np.ndarray:
                dens = float(piece.density(r))
                if dens == 0.0:
                    return np.zeros_like(y, dtype=complex)
                return dens * levy_kernel(y * signed * r, abs(signed) * r <= 1.0)

            result = integrate_complex(integrand, piece.lo, piece.hi, tol, breakpoints=[cut])
            total = total + result.value
        return total

    def mass_functional(self, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        if eta == 0:
            return 0.0
        cut = 1.0 / abs(eta)
        return math.fsum(
            p.integral(lambda r: np.minimum(1.0, (eta * r) ** 2), 0.0, math.inf, tol, [cut])
            for p in self.pieces
        )

    def compensator_shift(self, eta: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        eta = abs(eta)
        if eta == 1:
            return 0.0
        cut = math.inf if eta == 0 else 1.0 / eta
        total = 0.0
        for p in self.pieces:
            if cut > 1:
                total += p.side * p.integral(lambda r: r, 1.0, cut, tol)
            else:
                total -= p.side * p.integral(lambda r: r, cut, 1.0, tol)
        return total

    def moment_outside(self, g: Radial, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        if eta == 0:
            return 0.0
        eta = abs(eta)
        log_f = None
        if isinstance(g, Growth):
            shift = math.log(eta)
            log_f = lambda u: g.log_at(u + shift)  # noqa: E731
        return math.fsum(
            p.integral(lambda r: g(eta * r), 1.0 / eta, math.inf, tol, log_f=log_f)
            for p in self.pieces
        )

    def upper_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        ones = lambda r: np.ones_like(r)  # noqa: E731
        return math.fsum(p.integral(ones, v, math.inf, tol) for p in self.pieces if p.side == 1)

    def lower_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        ones = lambda r: np.ones_like(r)  # noqa: E731
        return math.fsum(p.integral(ones, v, math.inf, tol) for p in self.pieces if p.side == -1)

    def scaled(self, c: float) -> DensityMeasure:
        if c == 0:
            return DensityMeasure()
        return DensityMeasure(
            pieces=tuple(p.model_copy(update={"coef": p.coef * c}) for p in self.pieces)
        )

    def dilated(self, u: float) -> DensityMeasure:
        if u == 0:
            return DensityMeasure()
        return DensityMeasure(pieces=tuple(p.dilated(u) for p in self.pieces))


# --- parametric families ------------------------------------------------------------


class StableFamily(BaseModel):
    """Symmetric p-stable: c|x|^{-1-p} dx on both half-lines."""

    model_config = ConfigDict(frozen=True)

    name: Literal["stable"] = "stable"
    index: float = Field(gt=0, lt=2)
    coef: float = Field(gt=0)

    @property
    def sigma(self) -> float:
        """σ with exponent -σ|y|^p."""
        return stable_sigma(self.index, self.coef)


class GammaFamily(BaseModel):
    """c·x^{-1}·e^{-λx} on one half-line."""

    model_config = ConfigDict(frozen=True)

    name: Literal["gamma"] = "gamma"
    coef: float = Field(gt=0)
    rate: float = Field(default=1.0, gt=0)
    side: Literal[1, -1] = 1


def stable_sigma(index: float, coef: float) -> float:
    """σ = 2cΓ(1-p)cos(πp/2)/p, with the limit πc at p = 1."""
    if index == 1:
        return math.pi * coef
    return 2.0 * coef * math.gamma(1.0 - index) * math.cos(0.5 * math.pi * index) / index


def stable_coef(index: float, sigma: float) -> float:
    """Inverse of :func:`stable_sigma`."""
    return sigma / stable_sigma(index, 1.0)


class ParametricMeasure(_Measure):
    kind: Literal["parametric"] = "parametric"
    family: Annotated[StableFamily | GammaFamily, Field(discriminator="name")]

    def is_empty(self) -> bool:
        return False

    def is_symmetric(self) -> bool:
        return isinstance(self.family, StableFamily)

    def lk(self, y: np.ndarray, scale: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
        y = _grid(y)
        if scale == 0:
            return np.zeros_like(y, dtype=complex)
        f = self.family
        if isinstance(f, StableFamily):
            return (-f.sigma * np.abs(scale * y) ** f.index).astype(complex)
        rate = f.rate / abs(scale)
        side = f.side * math.copysign(1.0, scale)
        return -f.coef * np.log(1.0 - 1j * side * y / rate) - 1j * side * y * f.coef * (
            -math.expm1(-rate) / rate
        )

    def mass_functional(self, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        eta = abs(eta)
        if eta == 0:
            return 0.0
        f = self.family
        if isinstance(f, StableFamily):
            p = f.index
            return 2.0 * f.coef * eta**p * (1.0 / (2.0 - p) + 1.0 / p)
        k = f.rate / eta
        inner = eta**2 * (1.0 - math.exp(-k) * (1.0 + k)) / f.rate**2
        return f.coef * (inner + float(special.exp1(k)))

    def compensator_shift(self, eta: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        f = self.family
        if isinstance(f, StableFamily):
            return 0.0
        eta = abs(eta)
        far = 0.0 if eta == 0 else math.exp(-f.rate / eta)
        return f.side * f.coef * (math.exp(-f.rate) - far) / f.rate

    def moment_outside(self, g: Radial, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        eta = abs(eta)
        if eta == 0:
            return 0.0
        f = self.family
        if isinstance(f, StableFamily):
            p = f.index
            if isinstance(g, Growth) and g.log_power > -1:
                # ∫_1^∞ u^{k-1-p} (log u)^m du = Γ(m+1)/(p-k)^{m+1} for k < p
                if g.power >= p:
                    return math.inf
                rest = math.gamma(g.log_power + 1.0) / (p - g.power) ** (g.log_power + 1.0)
            else:
                rest = positive_integral(
                    lambda u: float(g(np.asarray(u))) * u ** (-1.0 - p), 1.0, math.inf, tol
                )
            return 2.0 * f.coef * eta**p * rest
        rate = f.rate / eta
        return f.coef * positive_integral(
            lambda u: float(g(np.asarray(u))) * math.exp(-rate * u) / u, 1.0, math.inf, tol
        )

    def _tail(self, v: float, side: int) -> float:
        f = self.family
        if isinstance(f, StableFamily):
            return math.inf if v <= 0 else f.coef * v ** (-f.index) / f.index
        if f.side != side:
            return 0.0
        return math.inf if v <= 0 else f.coef * float(special.exp1(f.rate * v))

    def upper_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        return self._tail(v, 1)

    def lower_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        return self._tail(v, -1)

    def scaled(self, c: float) -> LevyMeasure:
        if c == 0:
            return AtomicMeasure()
        return ParametricMeasure(family=self.family.model_copy(update={"coef": self.family.coef * c}))

    def dilated(self, u: float) -> LevyMeasure:
        if u == 0:
            return AtomicMeasure()
        f = self.family
        if isinstance(f, StableFamily):
            return ParametricMeasure(family=f.model_copy(update={"coef": f.coef * abs(u) ** f.index}))
        side = f.side if u > 0 else -f.side
        return ParametricMeasure(family=f.model_copy(update={"rate": f.rate / abs(u), "side": side}))


# --- composites -----------------------------------------------------------------------


class MixtureMeasure(_Measure):
    """Sum of measures."""

    kind: Literal["mixture"] = "mixture"
    parts: tuple[LevyMeasure, ...] = ()

    def is_empty(self) -> bool:
        return all(p.is_empty() for p in self.parts)

    def is_symmetric(self) -> bool:
        return all(p.is_symmetric() for p in self.parts)

    def lk(self, y: np.ndarray, scale: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
        total = np.zeros_like(_grid(y), dtype=complex)
        for p in self.parts:
            total = total + p.lk(y, scale, tol)
        return total

    def mass_functional(self, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        return math.fsum(p.mass_functional(eta, tol) for p in self.parts)

    def compensator_shift(self, eta: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        return math.fsum(p.compensator_shift(eta, tol) for p in self.parts)

    def moment_outside(self, g: Radial, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        return math.fsum(p.moment_outside(g, eta, tol) for p in self.parts)

    def upper_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        return math.fsum(p.upper_tail(v, tol) for p in self.parts)

    def lower_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        return math.fsum(p.lower_tail(v, tol) for p in self.parts)

    def radii(self) -> tuple[float, ...]:
        return tuple(sorted({r for p in self.parts for r in p.radii()}))

    def scaled(self, c: float) -> LevyMeasure:
        return merge_measures(*(p.scaled(c) for p in self.parts))

    def dilated(self, u: float) -> LevyMeasure:
        return merge_measures(*(p.dilated(u) for p in self.parts))


class ImageMeasure(_Measure):
    """∫ ρ(dt) M∘(h_eff(t)·)^{-1}: the Lévy measure of an integral-map image."""

    kind: Literal["image"] = "image"
    base: LevyMeasure
    mapping: IntegralMap

    def _levels(self, *levels: float) -> list[float]:
        points = set(self.mapping.zeros())
        for level in levels:
            for radius in self.base.radii():
                if math.isfinite(level) and level > 0:
                    points.update(self.mapping.crossings(level / radius))
        return sorted(points)

    def _outer(self, func: Callable[[float], float], breaks: list[float], tol: Tolerance) -> float:
        result = self.mapping.integrate(func, tol, breakpoints=breaks)
        if result.divergent:
            return math.copysign(math.inf, float(np.sum(result.value)) or 1.0)
        if not result.converged:
            raise QuadratureError(
                f"image measure integral over {self.mapping.label()}", abserr=result.abserr
            )
        return float(np.sum(result.value))

    def is_empty(self) -> bool:
        return self.base.is_empty() or self.mapping.is_degenerate()

    def is_symmetric(self) -> bool:
        return self.base.is_symmetric()

    def lk(self, y: np.ndarray, scale: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
        y = _grid(y)
        if scale == 0:
            return np.zeros_like(y, dtype=complex)
        m = self.mapping
        breaks = self._levels(1.0 / abs(scale))
        result = m.integrate(
            lambda t: self.base.lk(y, scale * float(m.h_eff(t)), tol),
            tol,
            breakpoints=breaks,
            complex_valued=True,
        )
        return np.asarray(result.value, dtype=complex)

    def mass_functional(self, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        if eta == 0:
            return 0.0
        m = self.mapping
        return self._outer(
            lambda t: self.base.mass_functional(abs(eta * float(m.h(t))), tol),
            self._levels(1.0 / abs(eta)),
            tol,
        )

    def compensator_shift(self, eta: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        m = self.mapping

        def inner(t: float) -> float:
            h = float(m.h_eff(t))
            if h == 0:
                return 0.0
            return h * (
                self.base.compensator_shift(abs(eta * h), tol)
                - self.base.compensator_shift(abs(h), tol)
            )

        levels = (1.0,) if eta == 0 else (1.0, 1.0 / abs(eta))
        return self._outer(inner, self._levels(*levels), tol)

    def moment_outside(self, g: Radial, eta: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        if eta == 0:
            return 0.0
        m = self.mapping
        return self._outer(
            lambda t: self.base.moment_outside(g, abs(eta * float(m.h(t))), tol),
            self._levels(1.0 / abs(eta)),
            tol,
        )

    def _tail(self, v: float, upper: bool, tol: Tolerance) -> float:
        m = self.mapping

        def inner(t: float) -> float:
            h = float(m.h_eff(t))
            if h == 0:
                return 0.0
            level = v / abs(h)
            if (h > 0) == upper:
                return self.base.upper_tail(level, tol)
            return self.base.lower_tail(level, tol)

        return self._outer(inner, self._levels(v) if v > 0 else m.zeros(), tol)

    def upper_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        return self._tail(v, True, tol)

    def lower_tail(self, v: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        return self._tail(v, False, tol)

    def scaled(self, c: float) -> LevyMeasure:
        if c == 0:
            return AtomicMeasure()
        return ImageMeasure(base=self.base.scaled(c), mapping=self.mapping)

    def dilated(self, u: float) -> LevyMeasure:
        if u == 0:
            return AtomicMeasure()
        return ImageMeasure(base=self.base, mapping=self.mapping.with_scaled_h(u))


LevyMeasure = Annotated[
    AtomicMeasure | DensityMeasure | ParametricMeasure | MixtureMeasure | ImageMeasure,
    Field(discriminator="kind"),
]

MixtureMeasure.model_rebuild()
ImageMeasure.model_rebuild()


def merge_measures(*measures: LevyMeasure) -> LevyMeasure:
    """Sum of Lévy measures, kept in the simplest representation available."""
    flat: list[LevyMeasure] = []
    for m in measures:
        flat.extend(m.parts if isinstance(m, MixtureMeasure) else [m])
    flat = [m for m in flat if not m.is_empty()]

    atoms = [m for m in flat if isinstance(m, AtomicMeasure)]
    densities = [m for m in flat if isinstance(m, DensityMeasure)]
    rest: list[LevyMeasure] = []
    stable: dict[float, float] = {}
    gamma: dict[tuple[float, int], float] = {}
    for m in flat:
        if isinstance(m, ParametricMeasure):
            f = m.family
            if isinstance(f, StableFamily):
                stable[f.index] = stable.get(f.index, 0.0) + f.coef
            else:
                gamma[(f.rate, f.side)] = gamma.get((f.rate, f.side), 0.0) + f.coef
        elif not isinstance(m, AtomicMeasure | DensityMeasure):
            rest.append(m)

    out: list[LevyMeasure] = []
    if atoms:
        merged = atoms[0]
        for m in atoms[1:]:
            merged = merged.merged(m)
        out.append(merged)
    if densities:
        out.append(DensityMeasure(pieces=tuple(p for m in densities for p in m.pieces)))
    out.extend(
        ParametricMeasure(family=StableFamily(index=p, coef=c)) for p, c in sorted(stable.items())
    )
    out.extend(
        ParametricMeasure(family=GammaFamily(coef=c, rate=rate, side=side))
        for (rate, side), c in sorted(gamma.items())
    )
    out.extend(rest)
    if not out:
        return AtomicMeasure()
    return out[0] if len(out) == 1 else MixtureMeasure(parts=tuple(out))


def stable_measure(index: float, coef: float) -> ParametricMeasure:
    return ParametricMeasure(family=StableFamily(index=index, coef=coef))


def gamma_measure(coef: float, rate: float = 1.0, side: Literal[1, -1] = 1) -> ParametricMeasure:
    return ParametricMeasure(family=GammaFamily(coef=coef, rate=rate, side=side))


def atomic(*pairs: tuple[float, float]) -> AtomicMeasure:
    """Build from (location, mass) pairs."""
    return AtomicMeasure(atoms=tuple(Atom(x=x, mass=m) for x, m in pairs))
