"""Numerical building blocks: quadrature, special functions, grids, random streams."""

from levicalc.numerics.grids import DEFAULT_Y_GRID, parse_y_grid
from levicalc.numerics.quadrature import (
    QuadratureResult,
    integrate,
    integrate_complex,
    positive_integral,
    require_converged,
    settled_value,
)
from levicalc.numerics.random import stream

__all__ = [
    "DEFAULT_Y_GRID",
    "QuadratureResult",
    "integrate",
    "integrate_complex",
    "parse_y_grid",
    "positive_integral",
    "require_converged",
    "settled_value",
    "stream",
]
