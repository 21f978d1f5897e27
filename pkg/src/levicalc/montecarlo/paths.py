"""Pathwise evaluation of ∫ h(t) dY(r(t)) by integration by parts.

Y is simulated on the clock images s_k = r(t_k) of a time grid on the map
interval, and the integral is read as

    h(t_K)·Y(s_K) - h(t_0)·Y(s_0) - Σ_k Y(s_k)·(h(t_{k+1}) - h(t_k)),

the left-endpoint Stieltjes sum matching the left limits Y(r(t)-). A
nonincreasing clock drives the reflected process, so the increments are
multiplied by the map's orientation.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from levicalc.config import (
    DEFAULT_TOLERANCE,
    MonteCarloSettings,
    Tolerance,
    resolve_settings,
)
from levicalc.errors import PreconditionError, TruncationWarning
from levicalc.kernels.clocks import DiracClock
from levicalc.kernels.mapping import IntegralMap
from levicalc.measures.triple import LevyTriple
from levicalc.montecarlo.increments import IncrementSampler, build_sampler
from levicalc.numerics.grids import DEFAULT_Y_GRID
from levicalc.numerics.random import stream
from levicalc.transform.exponent import transform_exponent

logger = logging.getLogger(__name__)

_MAX_WINDOW_STEPS = 60
_GEOMETRIC_SPAN = 100.0


class PathConfig(BaseModel):
    """Discretization and random-stream settings for path simulation."""

    model_config = ConfigDict(frozen=True)

    n_paths: int = Field(default=20_000, ge=1)
    resolution: int = Field(default=1000, ge=2, description="Points of the time grid")
    epsilon: float = Field(default=1e-3, gt=0, description="Jumps with |x| ≤ ε are dropped")
    seed: int = Field(default=0, ge=0)
    compensate_small_jumps: bool = True
    gaussian_substitute: bool = False
    window: tuple[float, float] | None = Field(
        default=None, description="Truncation (lo, hi] of an improper interval"
    )
    block_size: int = Field(default=2048, ge=1)

    @model_validator(mode="after")
    def _check_window(self) -> PathConfig:
        if self.window is not None and not self.window[0] < self.window[1]:
            msg = f"window needs lo < hi, got {self.window}"
            raise ValueError(msg)
        return self

    @classmethod
    def from_settings(
        cls, settings: MonteCarloSettings, seed: int, window: tuple[float, float] | None = None
    ) -> PathConfig:
        return cls(
            n_paths=settings.n_paths,
            resolution=settings.resolution,
            epsilon=settings.epsilon,
            block_size=settings.block_size,
            seed=seed,
            window=window,
        )


class IntegralSample(BaseModel):
    """One value of the random integral per simulated path."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    map: IntegralMap
    law: LevyTriple
    config: PathConfig
    window: tuple[float, float]

    @model_validator(mode="after")
    def _length(self) -> IntegralSample:
        if self.values.shape != (self.config.n_paths,):
            msg = f"expected {self.config.n_paths} values, got shape {self.values.shape}"
            raise ValueError(msg)
        return self


@dataclass(frozen=True)
class TimeGrid:
    """Grid t_0 < … < t_K with h(t_k) and the clock steps |s_{k+1} - s_k|."""

    t: np.ndarray
    h: np.ndarray
    steps: np.ndarray


@dataclass(frozen=True)
class CfEstimate:
    """Empirical characteristic function with per-point standard errors."""

    y: np.ndarray
    values: np.ndarray
    stderr: np.ndarray


def _finite_end(m: IntegralMap, t: float) -> bool:
    if math.isinf(t):
        return False
    return math.isfinite(m.h_limit(t)) and math.isfinite(m.r.at(t))


def needs_window(m: IntegralMap) -> bool:
    return not (_finite_end(m, m.a) and _finite_end(m, m.b))


def time_grid(m: IntegralMap, window: tuple[float, float], resolution: int) -> TimeGrid:
    """Grid on the window, geometric when it spans many orders of magnitude.

    Raises:
        PreconditionError: If h or the clock is unbounded on the window.
    """
    lo, hi = window
    if not (m.a <= lo < hi <= m.b) or math.isinf(hi):
        raise PreconditionError(f"window ({lo}, {hi}] is not a bounded part of ({m.a}, {m.b}]")
    if not (_finite_end(m, lo) and _finite_end(m, hi)):
        raise PreconditionError(
            f"clock image or integrand unbounded on ({lo:g}, {hi:g}]; choose a truncation window"
        )
    if lo > 0 and hi / lo > _GEOMETRIC_SPAN:
        t = np.geomspace(lo, hi, resolution)
    else:
        t = np.linspace(lo, hi, resolution)
    if isinstance(m.r, DiracClock):
        t = np.union1d(t, [m.r.params.at])
    h = np.asarray(m.h(t), dtype=float)
    h[0] = m.h_limit(lo)
    s = np.asarray(m.r(t), dtype=float)
    s[0] = m.r.at(lo)
    return TimeGrid(t=t, h=h, steps=np.abs(np.diff(s)))


def _block_values(
    sampler: IncrementSampler, grid: TimeGrid, orientation: float, seed: int, block: int, rows: int
) -> np.ndarray:
    rng = stream(seed, block)
    dz = orientation * sampler.sample(rng, grid.steps, rows)
    y = np.cumsum(dz, axis=1)
    left = np.concatenate([np.zeros((rows, 1)), y[:, :-1]], axis=1)
    return grid.h[-1] * y[:, -1] - left @ np.diff(grid.h)


def pathwise_integral(
    m: IntegralMap,
    t: LevyTriple,
    cfg: PathConfig,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> IntegralSample:
    """Simulate ``cfg.n_paths`` values of ∫_{(a,b]} h(t) dY_ν(r(t)).

    Path blocks of ``cfg.block_size`` run on a thread pool capped by
    LEVI_CALC_THREADS; block j draws from the stream (seed, j), so the result
    does not depend on the schedule.

    Raises:
        PreconditionError: If the interval is improper and no window is set.
    """
    if cfg.window is None:
        if needs_window(m):
            raise PreconditionError(
                f"{m.label()} has an unbounded clock image or integrand; set a truncation window"
            )
        window = (m.a, m.b)
    else:
        window = cfg.window
    grid = time_grid(m, window, cfg.resolution)
    sampler = build_sampler(
        t,
        cfg.epsilon,
        compensate_small_jumps=cfg.compensate_small_jumps,
        gaussian_substitute=cfg.gaussian_substitute,
        tol=tol,
    )
    sizes = [cfg.block_size] * (cfg.n_paths // cfg.block_size)
    if cfg.n_paths % cfg.block_size:
        sizes.append(cfg.n_paths % cfg.block_size)
    threads = resolve_settings().threads
    logger.info(
        "simulating %d paths in %d blocks on %d threads (%d grid points)",
        cfg.n_paths,
        len(sizes),
        threads,
        grid.t.size,
    )
    with ThreadPoolExecutor(max_workers=threads) as pool:
        blocks = list(
            pool.map(
                lambda job: _block_values(sampler, grid, m.orientation, cfg.seed, *job),
                enumerate(sizes),
            )
        )
    values = np.concatenate(blocks)
    return IntegralSample(values=values, map=m, law=t, config=cfg, window=window)


def empirical_cf(samples: IntegralSample | np.ndarray, y_grid: Sequence[float]) -> CfEstimate:
    """(1/n) Σ e^{iyX_k} with compensated summation, and its standard error.

    Raises:
        PreconditionError: With fewer than 100 samples.
    """
    x = samples.values if isinstance(samples, IntegralSample) else np.asarray(samples, dtype=float)
    n = x.size
    if n < 100:
        raise PreconditionError(f"empirical_cf needs at least 100 samples, got {n}")
    y = np.asarray(y_grid, dtype=float)
    values = np.empty(y.size, dtype=complex)
    stderr = np.empty(y.size)
    for i, point in enumerate(y):
        phase = point * x
        cos, sin = np.cos(phase), np.sin(phase)
        mean_re, mean_im = math.fsum(cos) / n, math.fsum(sin) / n
        values[i] = complex(mean_re, mean_im)
        spread = max(math.fsum(cos * cos) / n - mean_re**2 + math.fsum(sin * sin) / n - mean_im**2, 0.0)
        stderr[i] = math.sqrt(spread / n)
    return CfEstimate(y=y, values=values, stderr=stderr)


def riemann_exponent(
    m: IntegralMap, sampler: IncrementSampler, grid: TimeGrid, y: np.ndarray, tol: Tolerance
) -> np.ndarray:
    """Exact exponent of the simulated sum: Σ_k |Δs_k|·Φ_ε(orientation·h(t_{k+1})·y)."""
    phi = sampler.simulated.exponent(tol)
    total = np.zeros(y.size, dtype=complex)
    for step, h in zip(grid.steps, grid.h[1:], strict=True):
        if step:
            total += step * phi.func(m.orientation * h * y)
    return total


def window_exponent(
    m: IntegralMap, t: LevyTriple, window: tuple[float, float], y: np.ndarray, tol: Tolerance
) -> np.ndarray:
    """Exponent of the map restricted to the window."""
    part = m if window == (m.a, m.b) else m.restricted(*window)
    return transform_exponent(part, t.exponent(tol), tol)(y)


def discretization_bound(
    m: IntegralMap,
    t: LevyTriple,
    cfg: PathConfig,
    y_grid: Sequence[float] = DEFAULT_Y_GRID,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> np.ndarray:
    """|exp(simulated exponent) - exp(window exponent)| per y.

    Covers the Riemann sum on the grid and the jump truncation at ε.
    """
    window = cfg.window or (m.a, m.b)
    y = np.asarray(y_grid, dtype=float)
    grid = time_grid(m, window, cfg.resolution)
    sampler = build_sampler(
        t,
        cfg.epsilon,
        compensate_small_jumps=cfg.compensate_small_jumps,
        gaussian_substitute=cfg.gaussian_substitute,
        tol=tol,
    )
    simulated = riemann_exponent(m, sampler, grid, y, tol)
    exact = window_exponent(m, t, window, y, tol)
    return np.abs(np.exp(simulated) - np.exp(exact))


def _tail_size(m: IntegralMap, t: LevyTriple, lo: float, hi: float, y: np.ndarray, tol: Tolerance) -> float:
    part = m.restricted(lo, hi)
    return float(np.max(np.abs(transform_exponent(part, t.exponent(tol), tol)(y))))


def suggest_window(
    m: IntegralMap,
    t: LevyTriple,
    n_paths: int,
    y_grid: Sequence[float] = DEFAULT_Y_GRID,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> tuple[float, float]:
    """Smallest window by doubling whose neglected exponent is below a tenth of 1/√n.

    Raises:
        PreconditionError: If no window within the doubling budget is small enough.
    """
    y = np.asarray(y_grid, dtype=float)
    target = 0.1 / math.sqrt(n_paths)
    lo, hi = m.a, m.b

    if not _finite_end(m, m.b):
        for k in range(_MAX_WINDOW_STEPS):
            if math.isinf(m.b):
                hi = m.a + 2.0**k
            else:
                hi = m.b - (m.b - m.a) / 2.0 ** (k + 1)
            if _finite_end(m, hi) and _tail_size(m, t, hi, m.b, y, tol) <= target:
                break
        else:
            raise PreconditionError(f"no upper truncation of {m.label()} meets {target:.2e}")

    if not _finite_end(m, m.a):
        for k in range(_MAX_WINDOW_STEPS):
            lo = m.a + (min(hi, m.a + 1.0) - m.a) / 2.0 ** (k + 1)
            if _finite_end(m, lo) and _tail_size(m, t, m.a, lo, y, tol) <= target:
                break
        else:
            raise PreconditionError(f"no lower truncation of {m.label()} meets {target:.2e}")

    if (lo, hi) != (m.a, m.b):
        warnings.warn(
            f"{m.label()} truncated to ({lo:g}, {hi:g}] for simulation",
            TruncationWarning,
            stacklevel=2,
        )
    return lo, hi
