"""Registry of time changes r (the "clocks" of an integral map).

A clock only matters through the measure ρ = |dr| it induces and through
its direction. Each kind exposes its value, its density ``|r'|``, its limits at
the ends of the positive half-line, any point masses, and an inverse where a
closed form exists.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import special
from scipy.interpolate import PchipInterpolator

from levicalc.numerics.quadrature import positive_integral
from levicalc.numerics.special import incomplete_gamma

Direction = Literal["nondecreasing", "nonincreasing", "constant"]


class _Params(BaseModel):
    model_config = ConfigDict(frozen=True)


def _scan_grid(a: float, b: float) -> np.ndarray:
    if math.isinf(b):
        return a + np.geomspace(1e-9, 1e9, 801)
    return a + (b - a) * np.geomspace(1e-9, 1.0, 801)[:-1]


class _Clock(BaseModel):
    model_config = ConfigDict(frozen=True)

    def __call__(self, t: np.ndarray | float) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
            return self._eval(np.asarray(t, dtype=float))

    def _eval(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        raise NotImplementedError

    def density(self, t: np.ndarray | float) -> np.ndarray:
        """Density of ρ = |dr| with respect to Lebesgue measure."""
        with np.errstate(invalid="ignore"):
            return np.abs(self.derivative(t))

    def at(self, t: float) -> float:
        """r(t), with r(0+) and r(∞) taken as limits."""
        if math.isinf(t):
            return self._at_infinity()
        value = float(self(t))
        if t == 0 and not math.isfinite(value):
            return self._at_zero()
        return value

    def _at_zero(self) -> float:
        return float(self(0.0))

    def _at_infinity(self) -> float:
        return float(self(1e300))

    def direction(self, a: float, b: float) -> Direction:
        """Monotonicity of r on (a, b]; raises ValueError when r is not monotone."""
        slopes = self.derivative(_scan_grid(a, b))
        slopes = slopes[np.isfinite(slopes)]
        rising = bool(np.any(slopes > 0))
        falling = bool(np.any(slopes < 0))
        if rising and falling:
            msg = f"clock {self.label} is not monotone on ({a:g}, {b:g}]"
            raise ValueError(msg)
        if rising:
            return "nondecreasing"
        return "nonincreasing" if falling else "constant"

    def atoms(self, a: float, b: float) -> list[tuple[float, float]]:
        return []

    def inverse(self, value: float) -> float | None:
        return None

    def is_constant(self) -> bool:
        return False

    def reversed(self, anchor: float) -> TimeChange:
        """The clock anchor - r(t)."""
        return ReversedClock(base=self, anchor=anchor)  # type: ignore[arg-type]

    @property
    def label(self) -> str:
        return self.kind  # type: ignore[attr-defined]


# --- elementary family ------------------------------------------------------


class ElementaryTerm(BaseModel):
    """c·t^β·e^{-λt}."""

    model_config = ConfigDict(frozen=True)

    coef: float
    power: float = 0.0
    rate: float = Field(default=0.0, ge=0)


class _ElementaryLike(_Clock):
    """offset + Σ c·t^β·e^{-λt} + log_coef·log t."""

    def _terms(self) -> tuple[float, tuple[ElementaryTerm, ...], float]:
        raise NotImplementedError

    def _eval(self, t: np.ndarray) -> np.ndarray:
        offset, terms, log_coef = self._terms()
        out = np.full_like(t, offset)
        for term in terms:
            out = out + term.coef * np.power(t, term.power) * np.exp(-term.rate * t)
        if log_coef:
            out = out + log_coef * np.log(t)
        return out

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        _, terms, log_coef = self._terms()
        out = np.zeros_like(t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
            for term in terms:
                decay = np.exp(-term.rate * t)
                slope = -term.rate * np.power(t, term.power)
                if term.power != 0:
                    slope = slope + term.power * np.power(t, term.power - 1.0)
                out = out + term.coef * slope * decay
            if log_coef:
                out = out + log_coef / t
        return out

    def _at_zero(self) -> float:
        offset, terms, log_coef = self._terms()
        total = offset
        for term in terms:
            if term.power == 0:
                total += term.coef
            elif term.power < 0 and term.coef:
                total += math.copysign(math.inf, term.coef)
        if log_coef:
            total += math.copysign(math.inf, -log_coef)
        return total

    def _at_infinity(self) -> float:
        offset, terms, log_coef = self._terms()
        total = offset
        for term in terms:
            if term.rate > 0 or term.power < 0:
                continue
            if term.power == 0:
                total += term.coef
            elif term.coef:
                total += math.copysign(math.inf, term.coef)
        if log_coef:
            total += math.copysign(math.inf, log_coef)
        return total

    def is_constant(self) -> bool:
        _, terms, log_coef = self._terms()
        return log_coef == 0 and all(
            term.coef == 0 or (term.power == 0 and term.rate == 0) for term in terms
        )


class LinearClockParams(_Params):
    slope: float = 1.0
    offset: float = 0.0


class LinearClock(_ElementaryLike):
    """r(t) = slope·t + offset."""

    kind: Literal["linear"] = "linear"
    params: LinearClockParams = Field(default_factory=LinearClockParams)

    def _terms(self):
        return self.params.offset, (ElementaryTerm(coef=self.params.slope, power=1.0),), 0.0

    def inverse(self, value: float) -> float | None:
        p = self.params
        return (value - p.offset) / p.slope if p.slope else None

    def reversed(self, anchor: float) -> LinearClock:
        p = self.params
        return LinearClock(params=LinearClockParams(slope=-p.slope, offset=anchor - p.offset))

    @property
    def label(self) -> str:
        p = self.params
        if p.offset == 0:
            return "t" if p.slope == 1 else f"{p.slope:g}·t"
        return f"{p.slope:g}·t + {p.offset:g}"


class PowerClockParams(_Params):
    exponent: float
    coef: float = 1.0
    offset: float = 0.0


class PowerClock(_ElementaryLike):
    """r(t) = coef·t^β + offset."""

    kind: Literal["power"] = "power"
    params: PowerClockParams

    def _terms(self):
        p = self.params
        return p.offset, (ElementaryTerm(coef=p.coef, power=p.exponent),), 0.0

    def inverse(self, value: float) -> float | None:
        p = self.params
        ratio = (value - p.offset) / p.coef if p.coef else -1.0
        return ratio ** (1.0 / p.exponent) if ratio > 0 else None

    def reversed(self, anchor: float) -> PowerClock:
        p = self.params
        return PowerClock(
            params=PowerClockParams(exponent=p.exponent, coef=-p.coef, offset=anchor - p.offset)
        )

    @property
    def label(self) -> str:
        return f"{self.params.coef:g}·t^{self.params.exponent:g}"


class LogClockParams(_Params):
    coef: float = 1.0


class LogClock(_ElementaryLike):
    """r(t) = coef·log t."""

    kind: Literal["log"] = "log"
    params: LogClockParams = Field(default_factory=LogClockParams)

    def _terms(self):
        return 0.0, (), self.params.coef

    def inverse(self, value: float) -> float | None:
        return math.exp(value / self.params.coef) if self.params.coef else None

    def reversed(self, anchor: float) -> ElementaryClock:
        return ElementaryClock(params=ElementaryParams(offset=anchor, log_coef=-self.params.coef))

    @property
    def label(self) -> str:
        return f"{self.params.coef:g}·log t"


class ExpClockParams(_Params):
    rate: float = Field(default=1.0, gt=0)
    coef: float = 1.0
    offset: float = 0.0


class ExpClock(_ElementaryLike):
    """r(t) = coef·e^{-rate·t} + offset."""

    kind: Literal["exp"] = "exp"
    params: ExpClockParams = Field(default_factory=ExpClockParams)

    def _terms(self):
        p = self.params
        return p.offset, (ElementaryTerm(coef=p.coef, rate=p.rate),), 0.0

    def inverse(self, value: float) -> float | None:
        p = self.params
        ratio = (value - p.offset) / p.coef if p.coef else -1.0
        return -math.log(ratio) / p.rate if ratio > 0 else None

    def reversed(self, anchor: float) -> ExpClock:
        p = self.params
        return ExpClock(params=ExpClockParams(rate=p.rate, coef=-p.coef, offset=anchor - p.offset))

    @property
    def label(self) -> str:
        p = self.params
        return f"{p.coef:g}·e^(-{p.rate:g}t) + {p.offset:g}"


class ElementaryParams(_Params):
    offset: float = 0.0
    terms: tuple[ElementaryTerm, ...] = ()
    log_coef: float = 0.0


class ElementaryClock(_ElementaryLike):
    """Finite sum of c·t^β·e^{-λt} terms plus a logarithm."""

    kind: Literal["elementary"] = "elementary"
    params: ElementaryParams = Field(default_factory=ElementaryParams)

    def _terms(self):
        p = self.params
        return p.offset, p.terms, p.log_coef

    def reversed(self, anchor: float) -> ElementaryClock:
        p = self.params
        terms = tuple(
            ElementaryTerm(coef=-term.coef, power=term.power, rate=term.rate) for term in p.terms
        )
        return ElementaryClock(
            params=ElementaryParams(offset=anchor - p.offset, terms=terms, log_coef=-p.log_coef)
        )

    @property
    def label(self) -> str:
        p = self.params
        parts = [f"{t.coef:g}·t^{t.power:g}·e^(-{t.rate:g}t)" for t in p.terms]
        if p.log_coef:
            parts.append(f"{p.log_coef:g}·log t")
        if p.offset:
            parts.append(f"{p.offset:g}")
        return " + ".join(parts) or "0"


# --- special-function clocks ---------------------------------------------------


class LogPowerParams(_Params):
    power: float = Field(gt=0, description="m in coef·(-log t)^m")
    coef: float = 1.0


class LogPowerClock(_Clock):
    """r(t) = coef·(-log t)^m on (0, 1]."""

    kind: Literal["log_power"] = "log_power"
    params: LogPowerParams

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return self.params.coef * np.power(-np.log(t), self.params.power)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        m = self.params.power
        with np.errstate(divide="ignore", invalid="ignore"):
            return -self.params.coef * m * np.power(-np.log(t), m - 1.0) / t

    def _at_zero(self) -> float:
        return math.copysign(math.inf, self.params.coef)

    def direction(self, a: float, b: float) -> Direction:
        if b > 1:
            msg = "log_power clock is defined on (0, 1]"
            raise ValueError(msg)
        if self.params.coef == 0:
            return "constant"
        return "nonincreasing" if self.params.coef > 0 else "nondecreasing"

    def inverse(self, value: float) -> float | None:
        ratio = value / self.params.coef if self.params.coef else -1.0
        return math.exp(-(ratio ** (1.0 / self.params.power))) if ratio >= 0 else None

    def is_constant(self) -> bool:
        return self.params.coef == 0

    @property
    def label(self) -> str:
        return f"{self.params.coef:g}·(-log t)^{self.params.power:g}"


class GammaParams(_Params):
    alpha: float
    coef: float = 1.0


class IncompleteGammaClock(_Clock):
    """r(t) = coef·Γ(α; t), the upper incomplete gamma function."""

    kind: Literal["incomplete_gamma"] = "incomplete_gamma"
    params: GammaParams

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return self.params.coef * incomplete_gamma(self.params.alpha, t)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
            return -self.params.coef * np.power(t, self.params.alpha - 1.0) * np.exp(-t)

    def _at_zero(self) -> float:
        if self.params.alpha > 0:
            return self.params.coef * math.gamma(self.params.alpha)
        return math.copysign(math.inf, self.params.coef)

    def _at_infinity(self) -> float:
        return 0.0

    def direction(self, a: float, b: float) -> Direction:
        if self.params.coef == 0:
            return "constant"
        return "nonincreasing" if self.params.coef > 0 else "nondecreasing"

    def inverse(self, value: float) -> float | None:
        alpha, coef = self.params.alpha, self.params.coef
        if alpha <= 0 or coef == 0:
            return None
        q = value / (coef * math.gamma(alpha))
        return float(special.gammainccinv(alpha, q)) if 0 < q <= 1 else None

    def is_constant(self) -> bool:
        return self.params.coef == 0

    @property
    def label(self) -> str:
        return f"{self.params.coef:g}·Γ({self.params.alpha:g}; t)"


class GammaTailIntegralClock(_Clock):
    """r(t) = coef·∫_t^∞ s^{-1} Γ(α; s) ds."""

    kind: Literal["gamma_tail_integral"] = "gamma_tail_integral"
    params: GammaParams

    def _point(self, t: float) -> float:
        if t <= 0:
            return math.copysign(math.inf, self.params.coef)
        if math.isinf(t):
            return 0.0
        alpha = self.params.alpha
        # Swapping the order of integration: ∫_t^∞ u^{α-1} e^{-u} log(u/t) du.
        value = positive_integral(
            lambda u: np.power(u, alpha - 1.0) * np.exp(-u) * np.log(u / t), t, math.inf
        )
        return self.params.coef * value

    def _eval(self, t: np.ndarray) -> np.ndarray:
        flat = [self._point(float(s)) for s in np.ravel(t)]
        return np.asarray(flat, dtype=float).reshape(t.shape)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -self.params.coef * incomplete_gamma(self.params.alpha, t) / t

    def _at_zero(self) -> float:
        return math.copysign(math.inf, self.params.coef)

    def _at_infinity(self) -> float:
        return 0.0

    def direction(self, a: float, b: float) -> Direction:
        if self.params.coef == 0:
            return "constant"
        return "nonincreasing" if self.params.coef > 0 else "nondecreasing"

    def is_constant(self) -> bool:
        return self.params.coef == 0

    @property
    def label(self) -> str:
        return f"{self.params.coef:g}·∫_t^∞ Γ({self.params.alpha:g}; s) ds/s"


# --- degenerate and numeric clocks ------------------------------------------------


class DiracParams(_Params):
    at: float = Field(gt=0)


class DiracClock(_Clock):
    """r(t) = 1{t ≥ u}, so that ρ = δ_u."""

    kind: Literal["dirac"] = "dirac"
    params: DiracParams

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return (t >= self.params.at).astype(float)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        return np.zeros_like(np.asarray(t, dtype=float))

    def _at_infinity(self) -> float:
        return 1.0

    def direction(self, a: float, b: float) -> Direction:
        return "nondecreasing"

    def atoms(self, a: float, b: float) -> list[tuple[float, float]]:
        return [(self.params.at, 1.0)] if a < self.params.at <= b else []

    @property
    def label(self) -> str:
        return f"δ_{self.params.at:g}"


@lru_cache(maxsize=256)
def _pchip(nodes: tuple[float, ...], values: tuple[float, ...]) -> PchipInterpolator:
    return PchipInterpolator(np.log(nodes), values, extrapolate=False)


class TabulatedParams(_Params):
    nodes: tuple[float, ...]
    values: tuple[float, ...]

    @model_validator(mode="after")
    def _check(self) -> TabulatedParams:
        if len(self.nodes) < 2 or len(self.nodes) != len(self.values):
            msg = "tabulated clock needs at least two nodes and one value per node"
            raise ValueError(msg)
        if self.nodes[0] <= 0 or np.any(np.diff(self.nodes) <= 0):
            msg = "tabulated nodes must be positive and strictly increasing"
            raise ValueError(msg)
        steps = np.diff(self.values)
        if np.any(steps > 0) and np.any(steps < 0):
            msg = "tabulated values must be monotone"
            raise ValueError(msg)
        return self


class TabulatedClock(_Clock):
    """Monotone PCHIP interpolant in log t, constant outside the node range."""

    kind: Literal["tabulated"] = "tabulated"
    params: TabulatedParams

    def _eval(self, t: np.ndarray) -> np.ndarray:
        p = self.params
        clipped = np.clip(t, p.nodes[0], p.nodes[-1])
        return np.asarray(_pchip(p.nodes, p.values)(np.log(clipped)), dtype=float)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        p = self.params
        inside = (t >= p.nodes[0]) & (t <= p.nodes[-1])
        safe = np.where(inside, t, p.nodes[0])
        slope = _pchip(p.nodes, p.values).derivative()(np.log(safe)) / safe
        return np.where(inside, slope, 0.0)

    def _at_zero(self) -> float:
        return self.params.values[0]

    def _at_infinity(self) -> float:
        return self.params.values[-1]

    def direction(self, a: float, b: float) -> Direction:
        first, last = self.params.values[0], self.params.values[-1]
        if first == last:
            return "constant"
        return "nondecreasing" if last > first else "nonincreasing"

    def inverse(self, value: float) -> float | None:
        p = self.params
        grid = np.geomspace(p.nodes[0], p.nodes[-1], 4097)
        table = self(grid)
        if table[0] > table[-1]:
            grid, table = grid[::-1], table[::-1]
        if not table[0] <= value <= table[-1]:
            return None
        return float(np.interp(value, table, grid))

    def is_constant(self) -> bool:
        return self.params.values[0] == self.params.values[-1]

    @property
    def label(self) -> str:
        return f"tabulated[{len(self.params.nodes)}]"


class ReversedClock(_Clock):
    """r(t) = anchor - base(t)."""

    kind: Literal["reversed"] = "reversed"
    base: TimeChange
    anchor: float

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return self.anchor - self.base(t)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        return -self.base.derivative(t)

    def _at_zero(self) -> float:
        return self.anchor - self.base.at(0.0)

    def _at_infinity(self) -> float:
        return self.anchor - self.base.at(math.inf)

    def direction(self, a: float, b: float) -> Direction:
        flipped = {"nondecreasing": "nonincreasing", "nonincreasing": "nondecreasing"}
        base = self.base.direction(a, b)
        return flipped.get(base, base)  # type: ignore[return-value]

    def atoms(self, a: float, b: float) -> list[tuple[float, float]]:
        return self.base.atoms(a, b)

    def inverse(self, value: float) -> float | None:
        return self.base.inverse(self.anchor - value)

    def is_constant(self) -> bool:
        return self.base.is_constant()

    def reversed(self, anchor: float) -> TimeChange:
        return self.base if anchor == self.anchor else super().reversed(anchor)

    @property
    def label(self) -> str:
        return f"{self.anchor:g} - ({self.base.label})"


TimeChange = Annotated[
    LinearClock
    | PowerClock
    | LogClock
    | ExpClock
    | ElementaryClock
    | LogPowerClock
    | IncompleteGammaClock
    | GammaTailIntegralClock
    | DiracClock
    | TabulatedClock
    | ReversedClock,
    Field(discriminator="kind"),
]

ReversedClock.model_rebuild()


def lebesgue(slope: float = 1.0, offset: float = 0.0) -> LinearClock:
    return LinearClock(params=LinearClockParams(slope=slope, offset=offset))


def power_clock(exponent: float, coef: float = 1.0, offset: float = 0.0) -> PowerClock:
    return PowerClock(params=PowerClockParams(exponent=exponent, coef=coef, offset=offset))


def log_clock(coef: float = 1.0) -> LogClock:
    return LogClock(params=LogClockParams(coef=coef))


def exp_clock(rate: float = 1.0, coef: float = 1.0, offset: float = 0.0) -> ExpClock:
    return ExpClock(params=ExpClockParams(rate=rate, coef=coef, offset=offset))


def elementary(
    terms: list[tuple[float, float, float]], offset: float = 0.0, log_coef: float = 0.0
) -> ElementaryClock:
    """Build from (coef, power, rate) triples."""
    return ElementaryClock(
        params=ElementaryParams(
            offset=offset,
            terms=tuple(ElementaryTerm(coef=c, power=p, rate=r) for c, p, r in terms),
            log_coef=log_coef,
        )
    )


def log_power(power: float, coef: float = 1.0) -> LogPowerClock:
    return LogPowerClock(params=LogPowerParams(power=power, coef=coef))


def gamma_tail(alpha: float, coef: float = 1.0) -> IncompleteGammaClock:
    return IncompleteGammaClock(params=GammaParams(alpha=alpha, coef=coef))


def gamma_tail_integral(alpha: float, coef: float = 1.0) -> GammaTailIntegralClock:
    return GammaTailIntegralClock(params=GammaParams(alpha=alpha, coef=coef))


def dirac(at: float) -> DiracClock:
    return DiracClock(params=DiracParams(at=at))


def tabulated(nodes: np.ndarray, values: np.ndarray) -> TabulatedClock:
    return TabulatedClock(
        params=TabulatedParams(nodes=tuple(map(float, nodes)), values=tuple(map(float, values)))
    )
