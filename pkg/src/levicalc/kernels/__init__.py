"""Space transforms, clocks and integral maps."""

from levicalc.kernels import clocks, transforms
from levicalc.kernels.clocks import TimeChange
from levicalc.kernels.mapping import (
    IntegralMap,
    Interval,
    MapKind,
    RadialMeasure,
    classify,
    identity_map,
    load_map,
    p_functional,
    parse_map,
    reverse_clock,
    save_map,
)
from levicalc.kernels.transforms import SpaceTransform

__all__ = [
    "IntegralMap",
    "Interval",
    "MapKind",
    "RadialMeasure",
    "SpaceTransform",
    "TimeChange",
    "classify",
    "clocks",
    "identity_map",
    "load_map",
    "p_functional",
    "parse_map",
    "reverse_clock",
    "save_map",
    "transforms",
]
