"""Lévy exponents as callables with metadata."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from levicalc.numerics.grids import DEFAULT_Y_GRID


@dataclass(frozen=True)
class ExponentFn:
    """A Lévy exponent y ↦ Φ(y).

    Attributes:
        func: Vectorized evaluator taking a 1-D float array.
        is_symmetric: Φ is real (the law is symmetric).
        stable_index: p when Φ(y) = -σ|y|^p.
        label: Short description for reports.
    """

    func: Callable[[np.ndarray], np.ndarray]
    is_symmetric: bool = False
    stable_index: float | None = None
    label: str = field(default="", compare=False)

    def __call__(self, y: np.ndarray | float) -> Any:
        grid = np.atleast_1d(np.asarray(y, dtype=float))
        value = np.asarray(self.func(grid), dtype=complex)
        return complex(value[0]) if np.ndim(y) == 0 else value

    def __add__(self, other: ExponentFn) -> ExponentFn:
        index = self.stable_index if self.stable_index == other.stable_index else None
        return ExponentFn(
            func=lambda y: self.func(y) + other.func(y),
            is_symmetric=self.is_symmetric and other.is_symmetric,
            stable_index=index,
            label=f"{self.label} + {other.label}",
        )

    def scaled(self, c: float) -> ExponentFn:
        """c·Φ, the exponent of ν^{*c}."""
        return ExponentFn(
            func=lambda y: c * self.func(y),
            is_symmetric=self.is_symmetric,
            stable_index=self.stable_index,
            label=f"{c:g}·{self.label}",
        )

    def dilated(self, u: float) -> ExponentFn:
        """y ↦ Φ(uy), the exponent of the law of uX."""
        return ExponentFn(
            func=lambda y: self.func(u * y),
            is_symmetric=self.is_symmetric,
            stable_index=self.stable_index,
            label=f"{self.label}({u:g}·y)",
        )

    def reflected(self) -> ExponentFn:
        return self.dilated(-1.0)

    @classmethod
    def stable(cls, index: float, sigma: float) -> ExponentFn:
        """-σ|y|^p."""
        return cls(
            func=lambda y: (-sigma * np.abs(y) ** index).astype(complex),
            is_symmetric=True,
            stable_index=index,
            label=f"stable(p={index:g}, σ={sigma:g})",
        )

    @classmethod
    def zero(cls) -> ExponentFn:
        return cls(func=lambda y: np.zeros_like(y, dtype=complex), is_symmetric=True, label="0")


class InvariantReport(BaseModel):
    """Checks every Lévy exponent must pass."""

    model_config = ConfigDict(frozen=True)

    at_zero: float
    hermitian_defect: float
    max_real_part: float
    passed: bool


def check_exponent_invariants(
    phi: ExponentFn, grid: Sequence[float] = DEFAULT_Y_GRID, atol: float = 1e-10
) -> InvariantReport:
    """Φ(0) = 0, Φ(-y) = conj Φ(y) and Re Φ ≤ 0 on a grid."""
    y = np.asarray(grid, dtype=float)
    at_zero = abs(phi(0.0))
    plus, minus = phi(y), phi(-y)
    scale = np.maximum(1.0, np.abs(plus))
    hermitian = float(np.max(np.abs(minus - np.conj(plus)) / scale))
    max_real = float(np.max(plus.real / scale))
    return InvariantReport(
        at_zero=at_zero,
        hermitian_defect=hermitian,
        max_real_part=max_real,
        passed=at_zero <= atol and hermitian <= atol and max_real <= atol,
    )
