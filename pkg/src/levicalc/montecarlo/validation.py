"""End-to-end check of the analytic calculus against simulated paths."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import NotInDomainError
from levicalc.kernels.mapping import IntegralMap
from levicalc.measures.triple import LevyTriple
from levicalc.montecarlo.paths import (
    PathConfig,
    discretization_bound,
    empirical_cf,
    needs_window,
    pathwise_integral,
    suggest_window,
    window_exponent,
)
from levicalc.numerics.grids import DEFAULT_Y_GRID
from levicalc.reporting.schema import CfPoint, ReportModel
from levicalc.transform.domain import domain_check
from levicalc.transform.exponent import transform_exponent

logger = logging.getLogger(__name__)

DEFAULT_K_SIGMA = 5.0


class ValidationReport(ReportModel):
    """Empirical against analytic characteristic function of I(ν)."""

    map: str
    n_paths: int
    seed: int
    epsilon: float
    resolution: int
    window: tuple[float, float]
    k_sigma: float
    points: list[CfPoint]
    sup_error: float
    sup_stderr: float
    sup_budget: float
    passed: bool


def validate_map(
    m: IntegralMap,
    t: LevyTriple,
    cfg: PathConfig,
    y_grid: Sequence[float] = DEFAULT_Y_GRID,
    tol: Tolerance = DEFAULT_TOLERANCE,
    k_sigma: float = DEFAULT_K_SIGMA,
) -> ValidationReport:
    """Compare the simulated integral with exp of the transformed exponent.

    At each y the error |ĉ(y) - exp Φ(y)| must stay within
    k_sigma·stderr(y) plus the discretization bound plus the truncated tail.
    Without a window in ``cfg`` one is chosen by :func:`suggest_window`.

    Raises:
        NotInDomainError: If ν is outside the domain of the map.
    """
    report = domain_check(m, t, tol)
    if not report.admitted:
        raise NotInDomainError(
            f"law is outside the domain of {m.label()} ({', '.join(report.failed())})",
            report=report,
        )
    y = np.asarray(y_grid, dtype=float)
    if cfg.window is None and needs_window(m):
        cfg = cfg.model_copy(update={"window": suggest_window(m, t, cfg.n_paths, y, tol)})
    window = cfg.window or (m.a, m.b)

    sample = pathwise_integral(m, t, cfg, tol)
    estimate = empirical_cf(sample, y)
    exact = transform_exponent(m, t.exponent(tol), tol)(y)
    analytic = np.exp(exact)
    truncated = np.abs(analytic - np.exp(window_exponent(m, t, window, y, tol)))
    budget = k_sigma * estimate.stderr + discretization_bound(m, t, cfg, y, tol) + truncated
    error = np.abs(estimate.values - analytic)

    points = [
        CfPoint(
            y=float(y[i]),
            cf_empirical_re=float(estimate.values[i].real),
            cf_empirical_im=float(estimate.values[i].imag),
            cf_analytic_re=float(analytic[i].real),
            cf_analytic_im=float(analytic[i].imag),
            stderr=float(estimate.stderr[i]),
            budget=float(budget[i]),
        )
        for i in range(y.size)
    ]
    passed = bool(np.all(error <= budget))
    logger.info("validation of %s: sup error %.4f, passed=%s", m.label(), float(error.max()), passed)
    return ValidationReport(
        map=m.label(),
        n_paths=cfg.n_paths,
        seed=cfg.seed,
        epsilon=cfg.epsilon,
        resolution=cfg.resolution,
        window=window,
        k_sigma=k_sigma,
        points=points,
        sup_error=float(error.max()),
        sup_stderr=float(estimate.stderr.max()),
        sup_budget=float(budget.max()),
        passed=passed,
    )
