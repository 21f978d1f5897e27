"""Lévy triples [z, R, M] and the algebra of infinitely divisible laws."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import InputError
from levicalc.measures.exponent import ExponentFn
from levicalc.measures.levy import (
    AtomicMeasure,
    Growth,
    LevyMeasure,
    ParametricMeasure,
    StableFamily,
    merge_measures,
)


class LevyTriple(BaseModel):
    """Generating triple: shift z, Gaussian variance R ≥ 0 and Lévy measure M."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    shift: float = 0.0
    gaussian_var: float = Field(default=0.0, ge=0)
    levy: LevyMeasure = Field(default_factory=AtomicMeasure)

    def exponent(self, tol: Tolerance = DEFAULT_TOLERANCE) -> ExponentFn:
        return ExponentFn(
            func=lambda y: levy_exponent(self, y, tol),
            is_symmetric=self.is_symmetric(),
            stable_index=self.stable_index(),
            label="levy-khintchine",
        )

    def stable_index(self) -> float | None:
        """p for symmetric strictly stable triples, 2 for centered Gaussians."""
        if self.shift != 0:
            return None
        if self.levy.is_empty():
            return 2.0 if self.gaussian_var > 0 else None
        levy = self.levy
        if self.gaussian_var == 0 and isinstance(levy, ParametricMeasure):
            if isinstance(levy.family, StableFamily):
                return levy.family.index
        return None

    def is_symmetric(self) -> bool:
        return self.shift == 0 and self.levy.is_symmetric()

    def is_degenerate(self) -> bool:
        """Point mass at the shift."""
        return self.gaussian_var == 0 and self.levy.is_empty()


def levy_exponent(t: LevyTriple, y: np.ndarray | float, tol: Tolerance = DEFAULT_TOLERANCE) -> Any:
    """Φ(y) = iyz - ½Ry² + ∫(e^{iyx} - 1 - iyx·1_B(x)) M(dx).

    Returns a complex scalar for scalar ``y`` and an array otherwise.
    """
    grid = np.atleast_1d(np.asarray(y, dtype=float))
    value = 1j * grid * t.shift - 0.5 * t.gaussian_var * grid**2 + t.levy.lk(grid, 1.0, tol)
    return complex(value[0]) if np.ndim(y) == 0 else value


def convolve(first: LevyTriple, second: LevyTriple) -> LevyTriple:
    """Triple of the convolution: componentwise sum."""
    return LevyTriple(
        shift=first.shift + second.shift,
        gaussian_var=first.gaussian_var + second.gaussian_var,
        levy=merge_measures(first.levy, second.levy),
    )


def convolution_power(t: LevyTriple, c: float) -> LevyTriple:
    """Triple of ν^{*c}, c ≥ 0.

    Raises:
        InputError: If c is negative.
    """
    if c < 0:
        raise InputError(f"convolution power needs c ≥ 0, got {c}")
    return LevyTriple(shift=c * t.shift, gaussian_var=c * t.gaussian_var, levy=t.levy.scaled(c))


def dilate(t: LevyTriple, u: float, tol: Tolerance = DEFAULT_TOLERANCE) -> LevyTriple:
    """Triple of the law of uX.

    The jumps scale with u, so the compensator window moves from B to B/|u|;
    the shift collects the difference.
    """
    if u == 0:
        return LevyTriple()
    shift = u * t.shift + u * t.levy.compensator_shift(abs(u), tol)
    return LevyTriple(shift=shift, gaussian_var=u * u * t.gaussian_var, levy=t.levy.dilated(u))


def reflect(t: LevyTriple, tol: Tolerance = DEFAULT_TOLERANCE) -> LevyTriple:
    """Triple of ν⁻, the law of -X."""
    return dilate(t, -1.0, tol)


class MomentReport(BaseModel):
    """Outcome of a tail-moment test ∫_{|x|>1} g(|x|) M(dx) < ∞."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    name: str
    finite: bool
    value: float


def log_moment(t: LevyTriple, tol: Tolerance = DEFAULT_TOLERANCE) -> MomentReport:
    """∫_{|x|>1} log|x| M(dx)."""
    value = t.levy.moment_outside(Growth(log_power=1.0), 1.0, tol)
    return MomentReport(name="log", finite=math.isfinite(value), value=value)


def log_moment_finite(t: LevyTriple, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return log_moment(t, tol).finite


def tail_moment(t: LevyTriple, name: str, tol: Tolerance = DEFAULT_TOLERANCE) -> MomentReport:
    """Named tail moment: ``log``, ``log^m`` (m a positive number), ``power:p`` or ``second``.

    Raises:
        InputError: If the name is not recognized.
    """
    if name == "log":
        return log_moment(t, tol)
    if name == "second":
        g = Growth(power=2.0)
    elif name.startswith("log^"):
        m = float(name.removeprefix("log^"))
        g = Growth(log_power=m)
    elif name.startswith("power:"):
        p = float(name.removeprefix("power:"))
        g = Growth(power=p)
    else:
        raise InputError(f"unknown moment '{name}' (use log, log^m, power:p or second)")
    value = t.levy.moment_outside(g, 1.0, tol)
    return MomentReport(name=name, finite=math.isfinite(value), value=value)


def parse_triple(data: dict[str, Any]) -> LevyTriple:
    """Validate a law mapping.

    Raises:
        InputError: If the mapping does not describe a valid triple.
    """
    try:
        return LevyTriple.model_validate(data)
    except ValidationError as e:
        raise InputError(f"invalid law: {e}") from e


def load_triple(path: Path) -> LevyTriple:
    """Load a law from a JSON file.

    Raises:
        InputError: If the file is unreadable or invalid.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read law file {path}: {e}") from e
    return parse_triple(data)


def save_triple(t: LevyTriple, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(t.model_dump_json(indent=2), encoding="utf-8")
    return path
