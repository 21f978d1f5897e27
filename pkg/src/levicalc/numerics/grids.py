"""Evaluation grids for exponents and tails."""

from __future__ import annotations

import numpy as np

DEFAULT_Y_GRID: tuple[float, ...] = (-5.0, -2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0, 5.0)


def parse_y_grid(spec: str | None) -> np.ndarray:
    """Parse a y-grid specification.

    Accepted forms: ``default``, a comma-separated list (``0.5,1,2``),
    ``lin:START:STOP:N`` and ``log:START:STOP:N`` (positive ends).

    Args:
        spec: Grid specification; ``None`` means ``default``.

    Returns:
        Array of grid points.

    Raises:
        ValueError: If the specification cannot be parsed.
    """
    if spec is None or spec.strip() in ("", "default"):
        return np.array(DEFAULT_Y_GRID)
    spec = spec.strip()
    if spec.startswith(("lin:", "log:")):
        parts = spec.split(":")
        if len(parts) != 4:
            msg = f"Grid spec '{spec}' must look like lin:START:STOP:N"
            raise ValueError(msg)
        kind, start, stop, count = parts
        try:
            lo, hi, n = float(start), float(stop), int(count)
        except ValueError:
            msg = f"Grid spec '{spec}' has non-numeric bounds"
            raise ValueError(msg) from None
        if n < 1:
            msg = f"Grid spec '{spec}' needs at least one point"
            raise ValueError(msg)
        if kind == "lin":
            return np.linspace(lo, hi, n)
        if lo <= 0 or hi <= 0:
            msg = f"Log grid '{spec}' needs positive bounds"
            raise ValueError(msg)
        return np.geomspace(lo, hi, n)
    try:
        values = [float(item) for item in spec.split(",") if item.strip()]
    except ValueError:
        msg = f"Cannot parse y-grid '{spec}'"
        raise ValueError(msg) from None
    if not values:
        msg = f"Empty y-grid '{spec}'"
        raise ValueError(msg)
    return np.array(values)


def log_grid(lo: float, hi: float, n: int = 64) -> np.ndarray:
    """Log-spaced grid on [lo, hi]."""
    return np.geomspace(lo, hi, n)
