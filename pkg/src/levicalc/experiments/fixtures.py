"""Named laws and maps used by the acceptance experiments.

The same objects ship as JSON under ``data/laws`` and ``data/maps`` for the
command line.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from pathlib import Path
from typing import Any

from levicalc.analysis.classes import class_l_map, u_beta_map, upsilon_map
from levicalc.analysis.stable import StableLaw
from levicalc.errors import InputError
from levicalc.kernels.clocks import lebesgue, log_clock, power_clock
from levicalc.kernels.mapping import IntegralMap, identity_map, load_map, parse_map
from levicalc.kernels.transforms import linear
from levicalc.measures.levy import DensityMeasure, DensityPiece, atomic, gamma_measure, stable_measure
from levicalc.measures.triple import LevyTriple, load_triple, parse_triple


def _compound_poisson() -> LevyTriple:
    return LevyTriple(levy=atomic((2.0, 1.0), (-0.5, 2.0), (3.0, 0.5)))


def _pareto(power: float) -> LevyTriple:
    return LevyTriple(levy=DensityMeasure(pieces=(DensityPiece(lo=1.0, coef=1.0, power=power),)))


def _log_moment_infinite() -> LevyTriple:
    # x^{-1} (log x)^{-2} on (e, ∞): Lévy, with ∫ log x M(dx) = ∞
    piece = DensityPiece(lo=math.e, coef=1.0, power=1.0, log_power=-2.0)
    return LevyTriple(levy=DensityMeasure(pieces=(piece,)))


LAWS: dict[str, Callable[[], LevyTriple]] = {
    "gaussian": lambda: LevyTriple(gaussian_var=1.0),
    "shift": lambda: LevyTriple(shift=2.0),
    "atom": lambda: LevyTriple(levy=atomic((1.0, 1.0))),
    "compound_poisson": _compound_poisson,
    "cauchy": lambda: StableLaw(index=1.0).triple(),
    "stable_1_5": lambda: LevyTriple(levy=stable_measure(1.5, 1.0)),
    "gamma": lambda: LevyTriple(levy=gamma_measure(1.0, 1.0)),
    "pareto2": lambda: _pareto(2.0),
    "log_moment_infinite": _log_moment_infinite,
}

MAPS: dict[str, Callable[[], IntegralMap]] = {
    "identity": identity_map,
    "unit_linear": lambda: IntegralMap(h=linear(), r=lebesgue(), b=1.0),
    "class_l": class_l_map,
    "upsilon": upsilon_map,
    "u_beta_2": lambda: u_beta_map(2.0),
    "neg_log": lambda: IntegralMap(h=linear(), r=log_clock(-1.0), b=1.0),
    "inverse_cube": lambda: IntegralMap(h=linear(), r=power_clock(-3.0), b=1.0),
}


def _lookup(table: dict[str, Callable], kind: str, name: str):
    if name not in table:
        available = ", ".join(table)
        msg = f"Unknown {kind} '{name}'. Available: {available}"
        raise KeyError(msg)
    return table[name]()


def get_law(name: str) -> LevyTriple:
    """Build a named law.

    Raises:
        KeyError: If the name is unknown.
    """
    return _lookup(LAWS, "law", name)


def get_map(name: str) -> IntegralMap:
    """Build a named map.

    Raises:
        KeyError: If the name is unknown.
    """
    return _lookup(MAPS, "map", name)


def resolve_law(ref: str | dict[str, Any]) -> LevyTriple:
    """A fixture name, a JSON path or an inline law mapping.

    Raises:
        InputError: If the reference resolves to nothing.
    """
    if isinstance(ref, dict):
        return parse_triple(ref)
    if ref in LAWS:
        return get_law(ref)
    if Path(ref).suffix == ".json":
        return load_triple(Path(ref))
    raise InputError(f"unknown law '{ref}' (a fixture name or a .json file)")


def resolve_map(ref: str | dict[str, Any]) -> IntegralMap:
    """A fixture name, a JSON path or an inline map mapping.

    Raises:
        InputError: If the reference resolves to nothing.
    """
    if isinstance(ref, dict):
        return parse_map(ref)
    if ref in MAPS:
        return get_map(ref)
    if Path(ref).suffix == ".json":
        return load_map(Path(ref))
    raise InputError(f"unknown map '{ref}' (a fixture name or a .json file)")
