"""Integral maps I^{h,r}_{(a,b]} and the clock measures they integrate against."""

from __future__ import annotations

import json
import math
from collections.abc import Callable, Sequence
from functools import cached_property
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_serializer,
    field_validator,
    model_validator,
)

from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import InputError, PreconditionError
from levicalc.kernels.clocks import DiracClock, Direction, TimeChange, lebesgue
from levicalc.kernels.transforms import OpaqueTransform, SpaceTransform, const
from levicalc.numerics.quadrature import (
    QuadratureResult,
    integrate,
    integrate_complex,
    positive_integral,
)

MapKind = Literal["zero", "identity", "generic"]

_UNIT_TOL = 1e-12

# Kinds only defined for t in (0, 1].
_UNIT_DOMAIN_KINDS = frozenset({"power_complement", "log_power"})


def _parse_end(value: Any) -> Any:
    if isinstance(value, str) and value.strip().lower() in {"inf", "+inf", "infinity"}:
        return math.inf
    return value


def _dump_end(value: float) -> float | str:
    return "inf" if math.isinf(value) else value


def _table_grid(a: float, b: float) -> np.ndarray:
    if math.isinf(b):
        return a + np.geomspace(1e-10, 1e10, 8193)
    unit = np.concatenate([np.geomspace(1e-12, 1e-3, 2048, endpoint=False), np.linspace(1e-3, 1.0, 6145)])
    return a + (b - a) * unit


class Interval(BaseModel):
    """Half-open interval (a, b] with 0 ≤ a < b ≤ ∞."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    a: float = Field(default=0.0, ge=0)
    b: float

    @field_validator("b", mode="before")
    @classmethod
    def _parse_b(cls, v: Any) -> Any:
        return _parse_end(v)

    @model_validator(mode="after")
    def _ordered(self) -> Interval:
        if not self.a < self.b:
            msg = f"interval needs a < b, got ({self.a}, {self.b}]"
            raise ValueError(msg)
        return self

    @field_serializer("b")
    def _serialize_b(self, b: float) -> float | str:
        return _dump_end(b)

    def __contains__(self, t: float) -> bool:
        return self.a < t <= self.b


class RadialMeasure(BaseModel):
    """The measure ρ = |dr| on (a, b], with point masses for jump clocks."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    clock: TimeChange
    a: float = 0.0
    b: float = math.inf

    def mass(self, lo: float, hi: float) -> float:
        """ρ((lo, hi]) for a ≤ lo < hi ≤ b."""
        lo, hi = max(lo, self.a), min(hi, self.b)
        if not hi > lo:
            return 0.0
        delta = abs(self.clock.at(hi) - self.clock.at(lo))
        return 0.0 if math.isnan(delta) else delta

    @property
    def total_mass(self) -> float:
        return self.mass(self.a, self.b)

    def tail(self, w: float) -> float:
        """ρ((w, b])."""
        return self.mass(max(w, self.a), self.b) if w < self.b else 0.0

    def cdf(self, w: float) -> float:
        """ρ((a, w])."""
        return self.mass(self.a, min(w, self.b)) if w > self.a else 0.0

    def density(self, t: np.ndarray | float) -> np.ndarray:
        return self.clock.density(t)

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return self.clock.atoms(self.a, self.b)

    def integrate(
        self,
        func: Callable[[float], Any],
        tol: Tolerance = DEFAULT_TOLERANCE,
        *,
        breakpoints: Sequence[float] = (),
        complex_valued: bool = False,
    ) -> QuadratureResult:
        """∫ f dρ over (a, b], summing point masses and integrating the density."""
        atom_total: Any = 0.0
        for u, weight in self.atoms:
            atom_total = atom_total + weight * np.asarray(func(u))
        if isinstance(self.clock, DiracClock):
            return QuadratureResult(atom_total, 0.0, converged=True, pieces=0)

        def weighted(t: float) -> Any:
            dens = float(self.clock.density(t))
            if dens == 0.0:
                return 0.0 * np.asarray(func(t))
            return dens * np.asarray(func(t))

        quad = integrate_complex if complex_valued else integrate
        result = quad(weighted, self.a, self.b, tol, breakpoints=breakpoints)
        return QuadratureResult(
            result.value + atom_total,
            result.abserr,
            result.converged,
            result.divergent,
            result.pieces,
        )

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """Inverse of the normalized cdf, for finite total mass.

        Raises:
            PreconditionError: If ρ has infinite mass on (a, b].
        """
        total = self.total_mass
        if not math.isfinite(total) or total <= 0:
            raise PreconditionError(f"cannot sample from a clock measure of mass {total}")
        u = np.asarray(u, dtype=float)
        if self.atoms:
            return np.full_like(u, self.atoms[0][0])
        start = self.clock.at(self.a)
        sign = 1.0 if self.clock.direction(self.a, self.b) == "nondecreasing" else -1.0
        if self.clock.inverse(start + sign * 0.5 * total) is not None:
            flat = [self.clock.inverse(start + sign * q * total) for q in np.ravel(u)]
            out = np.array([self.b if t is None else t for t in flat], dtype=float)
            return np.clip(out, self.a, self.b).reshape(u.shape)
        grid = _table_grid(self.a, self.b)
        table = np.abs(self.clock(grid) - start) / total
        table = np.maximum.accumulate(np.nan_to_num(table, nan=0.0))
        return np.interp(u, table, grid)


class IntegralMap(BaseModel):
    """The map I^{h,r}_{(a,b]} with its orientation.

    The effective integrand is ``orientation·h`` where the orientation is -1
    for a nonincreasing clock and is flipped again when ``reflected`` is set
    (the map then acts on the reflected law).
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    h: SpaceTransform
    r: TimeChange
    a: float = Field(default=0.0, ge=0)
    b: float = math.inf
    reflected: bool = False
    allow_zero: bool = False

    @field_validator("b", mode="before")
    @classmethod
    def _parse_b(cls, v: Any) -> Any:
        return _parse_end(v)

    @field_serializer("b")
    def _serialize_b(self, b: float) -> float | str:
        return _dump_end(b)

    @model_validator(mode="after")
    def _check(self) -> IntegralMap:
        if not self.a < self.b:
            msg = f"map interval needs a < b, got ({self.a}, {self.b}]"
            raise ValueError(msg)
        if isinstance(self.r, DiracClock) and not self.a < self.r.params.at < self.b:
            msg = f"dirac clock point {self.r.params.at} must lie inside ({self.a}, {self.b})"
            raise ValueError(msg)
        if {self.h.kind, self.r.kind} & _UNIT_DOMAIN_KINDS and self.b > 1:
            msg = f"{self.h.kind}/{self.r.kind} maps are defined on (a, b] with b ≤ 1"
            raise ValueError(msg)
        _ = self.direction
        if not self.allow_zero and self.is_degenerate():
            msg = "degenerate map (h ≡ 0 or constant clock); set allow_zero to build it"
            raise ValueError(msg)
        return self

    # --- structure ------------------------------------------------------------------

    @cached_property
    def direction(self) -> Direction:
        return self.r.direction(self.a, self.b)

    @cached_property
    def orientation(self) -> float:
        sign = -1.0 if self.direction == "nonincreasing" else 1.0
        return -sign if self.reflected else sign

    @cached_property
    def radial(self) -> RadialMeasure:
        return RadialMeasure(clock=self.r, a=self.a, b=self.b)

    @property
    def interval(self) -> Interval:
        return Interval(a=self.a, b=self.b)

    @property
    def is_opaque(self) -> bool:
        return isinstance(self.h, OpaqueTransform)

    def is_degenerate(self) -> bool:
        if self.h.is_zero() or self.r.is_constant() or self.direction == "constant":
            return True
        return self.radial.total_mass == 0

    def h_eff(self, t: np.ndarray | float) -> np.ndarray:
        """orientation·h(t)."""
        return self.orientation * self.h(t)

    def h_limit(self, t: float) -> float:
        """h(t) with h(a+) read as a one-sided limit."""
        value = float(self.h(t))
        if math.isnan(value):
            nudge = t + 1e-12 * max(1.0, abs(t)) if t == self.a else t - 1e-12 * max(1.0, abs(t))
            value = float(self.h(nudge))
        return value

    def h_sup(self) -> float:
        """sup |h| on (a, b]."""
        if self.h.monotone:
            return max(abs(self.h_limit(self.a)), abs(self.h_limit(self.b)))
        hi = self.b if math.isfinite(self.b) else self.a + 1e3
        grid = np.linspace(self.a, hi, 2049)[1:]
        return float(np.nanmax(np.abs(self.h(grid))))

    def crossings(self, level: float) -> list[float]:
        """Points t in (a, b) with |h(t)| = level."""
        points: set[float] = set()
        for target in {level, -level}:
            if isinstance(self.h, OpaqueTransform):
                hi = self.b if math.isfinite(self.b) else self.a + 1e3
                points.update(self.h.solve(target, self.a, hi))
                continue
            t = self.h.inverse(target)
            if t is not None and self.a < t < self.b:
                points.add(t)
        return sorted(points)

    def zeros(self) -> list[float]:
        return self.crossings(0.0)

    def label(self) -> str:
        flag = "⁻" if self.reflected else ""
        return f"I{flag}[h={self.h.label}, r={self.r.label}]({self.a:g}, {self.b:g}]"

    # --- integration ----------------------------------------------------------------

    def integrate(
        self,
        func: Callable[[float], Any],
        tol: Tolerance = DEFAULT_TOLERANCE,
        *,
        breakpoints: Sequence[float] = (),
        complex_valued: bool = False,
    ) -> QuadratureResult:
        """∫_{(a,b]} f(t) ρ(dt)."""
        return self.radial.integrate(
            func, tol, breakpoints=breakpoints, complex_valued=complex_valued
        )

    def level_mass(self, w: float, *, upper: bool = True) -> float:
        """ρ{h_eff > w} (or ρ{h_eff < -w} when ``upper`` is false), for w ≥ 0."""
        nodes = [self.a, *self.crossings(w), *self.zeros(), self.b]
        nodes = sorted(set(nodes))
        total = 0.0
        for lo, hi in zip(nodes[:-1], nodes[1:], strict=True):
            mid = 0.5 * (lo + hi) if math.isfinite(hi) else max(2.0 * lo, lo + 1.0)
            value = float(self.h_eff(mid))
            if (value > w) if upper else (value < -w):
                total += self.radial.mass(lo, hi)
        return total

    # --- variants -------------------------------------------------------------------

    def replace(self, **changes: Any) -> IntegralMap:
        fields = {name: getattr(self, name) for name in type(self).model_fields}
        return type(self)(**{**fields, **changes})

    def restricted(self, lo: float, hi: float) -> IntegralMap:
        """Restriction to a subinterval (lo, hi] of (a, b]."""
        if not self.a <= lo < hi <= self.b:
            raise PreconditionError(f"({lo}, {hi}] is not inside ({self.a}, {self.b}]")
        return self.replace(a=lo, b=hi)

    def with_scaled_h(self, u: float) -> IntegralMap:
        return self.replace(h=self.h.scaled(u), allow_zero=self.allow_zero or u == 0)


def p_functional(m: IntegralMap, p: float, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """∫_{(a,b]} |h(t)|^p ρ(dt); ``inf`` when the integral diverges."""
    breaks = m.zeros()
    if m.radial.atoms:
        return float(sum(w * abs(m.h_limit(u)) ** p for u, w in m.radial.atoms))

    def integrand(t: float) -> float:
        return float(np.abs(m.h(t)) ** p * m.r.density(t))

    return positive_integral(integrand, m.a, m.b, tol, breakpoints=breaks)


def classify(m: IntegralMap) -> MapKind:
    """Recognize the zero map and the identity map.

    The identity needs the effective integrand to be 1: either h_eff ≡ 1 with
    unit clock mass, or a unit point clock δ_u with h_eff(u) = 1.
    """
    if m.is_degenerate():
        return "zero"
    atoms = m.radial.atoms
    if atoms:
        u, mass = atoms[0]
        if abs(m.orientation * m.h_limit(u) - 1.0) < _UNIT_TOL and abs(mass - 1.0) < _UNIT_TOL:
            return "identity"
        return "generic"
    if m.h.is_constant() and abs(m.orientation * m.h_limit(m.b) - 1.0) < _UNIT_TOL:
        if abs(m.radial.total_mass - 1.0) < _UNIT_TOL:
            return "identity"
    return "generic"


def reverse_clock(m: IntegralMap) -> IntegralMap:
    """Swap a nonincreasing clock r for r(a+) - r(t) and flag the map reflected.

    The transform is unchanged: the clock now increases and the map acts on
    the reflected law.

    Raises:
        PreconditionError: If r is not nonincreasing or r(a+) is infinite.
    """
    if m.direction != "nonincreasing":
        raise PreconditionError("reverse_clock needs a nonincreasing clock")
    anchor = m.r.at(m.a)
    if not math.isfinite(anchor):
        raise PreconditionError("reverse_clock needs a finite r(a+)")
    return m.replace(r=m.r.reversed(anchor), reflected=not m.reflected)


def identity_map() -> IntegralMap:
    """h ≡ 1 against Lebesgue measure on (0, 1]."""
    return IntegralMap(h=const(1.0), r=lebesgue(), a=0.0, b=1.0)


def parse_map(data: dict[str, Any]) -> IntegralMap:
    """Validate a map mapping.

    Raises:
        InputError: If the mapping does not describe a valid map.
    """
    try:
        return IntegralMap.model_validate(data)
    except ValidationError as e:
        raise InputError(f"invalid map: {e}") from e


def load_map(path: Path) -> IntegralMap:
    """Load a map from a JSON file.

    Raises:
        InputError: If the file is unreadable or invalid.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read map file {path}: {e}") from e
    return parse_map(data)


def save_map(m: IntegralMap, path: Path) -> Path:
    if m.is_opaque:
        raise InputError("opaque maps cannot be serialized")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(m.model_dump_json(indent=2), encoding="utf-8")
    return path
