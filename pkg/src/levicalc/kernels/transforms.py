"""Registry of space transforms h.

Every registered kind is monotone on its natural domain, which makes level
sets single points found by a closed-form inverse. Every kind carries a
``scale`` so that scalar multiples (including negation) stay in the registry.
The ``opaque`` kind wraps an arbitrary callable; it cannot be serialized and
disables composition and the catalog.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from typing import Annotated, Any, ClassVar, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.optimize import brentq


class _Params(BaseModel):
    model_config = ConfigDict(frozen=True)


class ConstParams(_Params):
    value: float = 1.0


class ScaleParams(_Params):
    scale: float = 1.0


class PowerParams(_Params):
    exponent: float
    scale: float = 1.0

    @field_validator("exponent")
    @classmethod
    def _nonzero(cls, v: float) -> float:
        if v == 0:
            msg = "power exponent 0 is the const kind"
            raise ValueError(msg)
        return v


class ExpParams(_Params):
    rate: float = Field(default=1.0, gt=0)
    scale: float = 1.0


class PowerComplementParams(_Params):
    inner: float = Field(gt=0, description="γ in (1 - t^γ)^δ")
    outer: float = Field(gt=0, description="δ in (1 - t^γ)^δ")
    scale: float = 1.0


class _Transform(BaseModel):
    model_config = ConfigDict(frozen=True)

    monotone: ClassVar[bool] = True

    def __call__(self, t: np.ndarray | float) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self._eval(np.asarray(t, dtype=float))

    def _eval(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        raise NotImplementedError

    def inverse(self, value: float) -> float | None:
        """Point t with h(t) = value, or None (monotone kinds only)."""
        raise NotImplementedError

    def scaled(self, u: float) -> SpaceTransform:
        raise NotImplementedError

    def is_zero(self) -> bool:
        return False

    def is_constant(self) -> bool:
        return False

    @property
    def label(self) -> str:
        return self.kind  # type: ignore[attr-defined]


class ConstTransform(_Transform):
    """h(t) = c."""

    kind: Literal["const"] = "const"
    params: ConstParams = Field(default_factory=ConstParams)

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return np.full_like(t, self.params.value)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        return np.zeros_like(np.asarray(t, dtype=float))

    def inverse(self, value: float) -> float | None:
        return None

    def scaled(self, u: float) -> ConstTransform:
        return ConstTransform(params=ConstParams(value=self.params.value * u))

    def is_zero(self) -> bool:
        return self.params.value == 0

    def is_constant(self) -> bool:
        return True

    @property
    def label(self) -> str:
        return f"{self.params.value:g}"


class LinearTransform(_Transform):
    """h(t) = scale·t."""

    kind: Literal["linear"] = "linear"
    params: ScaleParams = Field(default_factory=ScaleParams)

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return self.params.scale * t

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        return np.full_like(np.asarray(t, dtype=float), self.params.scale)

    def inverse(self, value: float) -> float | None:
        return value / self.params.scale if self.params.scale else None

    def scaled(self, u: float) -> LinearTransform:
        return LinearTransform(params=ScaleParams(scale=self.params.scale * u))

    def is_zero(self) -> bool:
        return self.params.scale == 0

    @property
    def label(self) -> str:
        return "t" if self.params.scale == 1 else f"{self.params.scale:g}·t"


class PowerTransform(_Transform):
    """h(t) = scale·t^α."""

    kind: Literal["power"] = "power"
    params: PowerParams

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return self.params.scale * np.power(t, self.params.exponent)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        alpha = self.params.exponent
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.params.scale * alpha * np.power(t, alpha - 1.0)

    def inverse(self, value: float) -> float | None:
        ratio = value / self.params.scale if self.params.scale else -1.0
        if ratio <= 0:
            return None
        return ratio ** (1.0 / self.params.exponent)

    def scaled(self, u: float) -> PowerTransform:
        return PowerTransform(
            params=PowerParams(exponent=self.params.exponent, scale=self.params.scale * u)
        )

    def is_zero(self) -> bool:
        return self.params.scale == 0

    @property
    def label(self) -> str:
        return f"{self.params.scale:g}·t^{self.params.exponent:g}"


class ExpTransform(_Transform):
    """h(t) = scale·e^{-rate·t}."""

    kind: Literal["exp"] = "exp"
    params: ExpParams = Field(default_factory=ExpParams)

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return self.params.scale * np.exp(-self.params.rate * t)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return -self.params.rate * self.params.scale * np.exp(-self.params.rate * t)

    def inverse(self, value: float) -> float | None:
        ratio = value / self.params.scale if self.params.scale else -1.0
        if ratio <= 0:
            return None
        return -math.log(ratio) / self.params.rate

    def scaled(self, u: float) -> ExpTransform:
        return ExpTransform(params=ExpParams(rate=self.params.rate, scale=self.params.scale * u))

    def is_zero(self) -> bool:
        return self.params.scale == 0

    @property
    def label(self) -> str:
        return f"{self.params.scale:g}·e^(-{self.params.rate:g}t)"


class NegLogTransform(_Transform):
    """h(t) = -scale·log t."""

    kind: Literal["neg_log"] = "neg_log"
    params: ScaleParams = Field(default_factory=ScaleParams)

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return -self.params.scale * np.log(t)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return -self.params.scale / t

    def inverse(self, value: float) -> float | None:
        if self.params.scale == 0:
            return None
        return math.exp(-value / self.params.scale)

    def scaled(self, u: float) -> NegLogTransform:
        return NegLogTransform(params=ScaleParams(scale=self.params.scale * u))

    def is_zero(self) -> bool:
        return self.params.scale == 0

    @property
    def label(self) -> str:
        return f"-{self.params.scale:g}·log t"


class PowerComplementTransform(_Transform):
    """h(t) = scale·(1 - t^γ)^δ on [0, 1]."""

    kind: Literal["power_complement"] = "power_complement"
    params: PowerComplementParams

    def _eval(self, t: np.ndarray) -> np.ndarray:
        base = np.clip(1.0 - np.power(t, self.params.inner), 0.0, None)
        return self.params.scale * np.power(base, self.params.outer)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        g, d = self.params.inner, self.params.outer
        with np.errstate(divide="ignore", invalid="ignore"):
            base = np.clip(1.0 - np.power(t, g), 0.0, None)
            return -self.params.scale * d * np.power(base, d - 1.0) * g * np.power(t, g - 1.0)

    def inverse(self, value: float) -> float | None:
        ratio = value / self.params.scale if self.params.scale else -1.0
        if not 0 <= ratio <= 1:
            return None
        return (1.0 - ratio ** (1.0 / self.params.outer)) ** (1.0 / self.params.inner)

    def scaled(self, u: float) -> PowerComplementTransform:
        p = self.params
        return PowerComplementTransform(
            params=PowerComplementParams(inner=p.inner, outer=p.outer, scale=p.scale * u)
        )

    def is_zero(self) -> bool:
        return self.params.scale == 0

    @property
    def label(self) -> str:
        p = self.params
        return f"{p.scale:g}·(1-t^{p.inner:g})^{p.outer:g}"


class OpaqueTransform(_Transform):
    """Arbitrary callable; excluded from serialization, composition and the catalog."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["opaque"] = "opaque"
    func: Callable[[np.ndarray], np.ndarray] = Field(exclude=True)
    monotone: ClassVar[bool] = False

    def _eval(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(t), dtype=float)

    def derivative(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        step = 1e-6 * np.maximum(np.abs(t), 1.0)
        return (self(t + step) - self(t - step)) / (2.0 * step)

    def inverse(self, value: float) -> float | None:
        return None

    def solve(self, value: float, lo: float, hi: float, samples: int = 257) -> list[float]:
        """All sign changes of h - value on a sample grid, refined by brentq."""
        grid = np.linspace(lo, hi, samples)
        diff = self(grid) - value
        roots = []
        for left, right, f_left, f_right in zip(grid[:-1], grid[1:], diff[:-1], diff[1:], strict=True):
            if np.isfinite(f_left) and np.isfinite(f_right) and f_left * f_right < 0:
                roots.append(brentq(lambda s: float(self(s)) - value, left, right))
        return roots

    def scaled(self, u: float) -> OpaqueTransform:
        func = self.func
        return OpaqueTransform(func=lambda t: u * np.asarray(func(t)))


SpaceTransform = Annotated[
    ConstTransform
    | LinearTransform
    | PowerTransform
    | ExpTransform
    | NegLogTransform
    | PowerComplementTransform
    | OpaqueTransform,
    Field(discriminator="kind"),
]


def const(value: float) -> ConstTransform:
    return ConstTransform(params=ConstParams(value=value))


def linear(scale: float = 1.0) -> LinearTransform:
    return LinearTransform(params=ScaleParams(scale=scale))


def power(exponent: float, scale: float = 1.0) -> PowerTransform:
    return PowerTransform(params=PowerParams(exponent=exponent, scale=scale))


def exp_decay(rate: float = 1.0, scale: float = 1.0) -> ExpTransform:
    return ExpTransform(params=ExpParams(rate=rate, scale=scale))


def neg_log(scale: float = 1.0) -> NegLogTransform:
    return NegLogTransform(params=ScaleParams(scale=scale))


def power_complement(inner: float, outer: float, scale: float = 1.0) -> PowerComplementTransform:
    return PowerComplementTransform(
        params=PowerComplementParams(inner=inner, outer=outer, scale=scale)
    )


def opaque(func: Callable[[np.ndarray], Any]) -> OpaqueTransform:
    return OpaqueTransform(func=func)
