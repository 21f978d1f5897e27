"""Path simulation and Monte Carlo validation of integral maps."""

from levicalc.montecarlo.increments import (
    IncrementSampler,
    build_sampler,
    sample_levy_increments,
    symmetric_stable,
)
from levicalc.montecarlo.paths import (
    CfEstimate,
    IntegralSample,
    PathConfig,
    discretization_bound,
    empirical_cf,
    pathwise_integral,
    suggest_window,
)
from levicalc.montecarlo.validation import ValidationReport, validate_map

__all__ = [
    "CfEstimate",
    "IncrementSampler",
    "IntegralSample",
    "PathConfig",
    "ValidationReport",
    "build_sampler",
    "discretization_bound",
    "empirical_cf",
    "pathwise_integral",
    "sample_levy_increments",
    "suggest_window",
    "symmetric_stable",
    "validate_map",
]
