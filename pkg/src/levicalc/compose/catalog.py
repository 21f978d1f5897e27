"""Curated catalog of compositions with closed-form image measures.

Each entry names a list of constituent maps, the canonical single map
I^{±w, hρ} their composition reduces to, alternative closed forms of the
same map, and the tail w ↦ hρ{|x| > w} of the image measure.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from levicalc.errors import InputError
from levicalc.kernels.clocks import (
    elementary,
    exp_clock,
    gamma_tail,
    gamma_tail_integral,
    lebesgue,
    log_power,
    power_clock,
)
from levicalc.kernels.mapping import IntegralMap
from levicalc.kernels.transforms import exp_decay, linear, power, power_complement
from levicalc.numerics.special import gamma0

CATALOG_VERSION = "v1"

Params = dict[str, float]


@dataclass(frozen=True)
class CatalogEntry:
    """A composition with a known image measure.

    Entries without constituents are numeric evaluators that other entries
    rely on.
    """

    name: str
    description: str
    validity: str
    finite: bool
    tail: Callable[..., float]
    defaults: Params = field(default_factory=dict)
    constituents: Callable[..., list[IntegralMap]] | None = None
    canonical: Callable[..., IntegralMap] | None = None
    alternates: Callable[..., list[IntegralMap]] = lambda **_: []
    infer: Callable[[list[IntegralMap]], Params | None] = lambda _maps: {}
    check: Callable[[Params], None] = lambda _params: None

    @property
    def is_evaluator(self) -> bool:
        return self.constituents is None

    def resolve(self, params: Params | None = None) -> Params:
        """Defaults overridden by ``params``, validated.

        Raises:
            InputError: If a parameter is unknown or out of range.
        """
        params = dict(params or {})
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise InputError(f"{self.name} has no parameter(s) {sorted(unknown)}")
        merged = {**self.defaults, **params}
        self.check(merged)
        return merged


# --- checks -----------------------------------------------------------------


def _positive(name: str) -> Callable[[Params], None]:
    def check(params: Params) -> None:
        if not params[name] > 0:
            raise InputError(f"{name} must be positive, got {params[name]}")

    return check


def _order(params: Params) -> None:
    m = params["m"]
    if m < 1 or m != int(m):
        raise InputError(f"m must be a positive integer, got {m}")


# --- constituent maps ----------------------------------------------------------


def _class_l() -> IntegralMap:
    return IntegralMap(h=exp_decay(), r=lebesgue())


def _upsilon() -> IntegralMap:
    return IntegralMap(h=linear(), r=exp_clock(rate=1.0, coef=-1.0, offset=1.0))


def _unit_power(exponent: float) -> IntegralMap:
    return IntegralMap(h=power(exponent), r=lebesgue(), b=1.0)


# --- parameter inference ----------------------------------------------------------


def _power_exponents(maps: list[IntegralMap]) -> list[float]:
    return [m.h.params.exponent for m in maps if m.h.kind == "power"]


def _infer_order(maps: list[IntegralMap]) -> Params | None:
    return {"m": float(len(maps))} if maps else None


def _infer_two_power(maps: list[IntegralMap]) -> Params | None:
    exponents = _power_exponents(maps)
    if len(maps) != 2 or len(exponents) != 2 or max(exponents) <= 0:
        return None
    return {"beta": 1.0 / max(exponents)}


def _infer_power_exp(maps: list[IntegralMap]) -> Params | None:
    exponents = _power_exponents(maps)
    if len(maps) != 2 or len(exponents) != 1 or exponents[0] <= 0:
        return None
    return {"beta": 1.0 / exponents[0]}


def _infer_gamma(maps: list[IntegralMap]) -> Params | None:
    alphas = [m.r.params.alpha for m in maps if m.r.kind == "incomplete_gamma"]
    if len(maps) != 2 or len(alphas) != 1:
        return None
    return {"alpha": alphas[0]}


# --- closed-form tails -------------------------------------------------------------


def _thorin_tail(w: float) -> float:
    return gamma0(w)


def _order_tail(w: float, m: float) -> float:
    if w >= 1:
        return 0.0
    return (-math.log(w)) ** m / math.factorial(int(m))


def _two_power_tail(w: float, beta: float) -> float:
    if w >= 1:
        return 0.0
    if w <= 0:
        return 1.0
    u = w**beta
    return 1.0 - (2.0 * u - u * u)


def _power_exp_tail(w: float, beta: float) -> float:
    if w >= 1:
        return 0.0
    return w**beta / beta - math.log(w) - 1.0 / beta


def _gamma_clock_tail(w: float, alpha: float) -> float:
    return float(gamma_tail_integral(alpha).at(w))


# Entry registry
ENTRIES: dict[str, CatalogEntry] = {
    "thorin": CatalogEntry(
        name="thorin",
        description="e^{-t} against dt composed with t against 1-e^{-t}: image density e^{-w}/w, tail Γ(0;w)",
        validity="all parameters fixed; image measure infinite near 0",
        finite=False,
        tail=_thorin_tail,
        constituents=lambda: [_class_l(), _upsilon()],
        canonical=lambda: IntegralMap(h=linear(-1.0), r=gamma_tail(0.0)),
        alternates=lambda: [IntegralMap(h=linear(), r=gamma_tail(0.0), reflected=True)],
    ),
    "class_lm": CatalogEntry(
        name="class_lm",
        description="m-fold self-composition of e^{-t} against dt: tail (-log w)^m/m! on (0,1]",
        validity="integer m ≥ 1",
        finite=False,
        tail=_order_tail,
        defaults={"m": 2.0},
        constituents=lambda m: [_class_l() for _ in range(int(m))],
        canonical=lambda m: IntegralMap(
            h=linear(-1.0), r=log_power(m, 1.0 / math.factorial(int(m))), b=1.0
        ),
        alternates=lambda m: [
            IntegralMap(h=exp_decay(), r=power_clock(m, 1.0 / math.factorial(int(m))))
        ],
        infer=_infer_order,
        check=_order,
    ),
    "two_power": CatalogEntry(
        name="two_power",
        description="t^{1/β} composed with t^{1/(2β)} on (0,1]: cdf 2w^β - w^{2β}",
        validity="β > 0; probability image",
        finite=True,
        tail=_two_power_tail,
        defaults={"beta": 1.0},
        constituents=lambda beta: [_unit_power(1.0 / beta), _unit_power(0.5 / beta)],
        canonical=lambda beta: IntegralMap(
            h=linear(), r=elementary([(2.0, beta, 0.0), (-1.0, 2.0 * beta, 0.0)]), b=1.0
        ),
        alternates=lambda beta: [
            IntegralMap(h=power_complement(0.5, 1.0 / beta), r=lebesgue(), b=1.0)
        ],
        infer=_infer_two_power,
        check=_positive("beta"),
    ),
    "power_exp": CatalogEntry(
        name="power_exp",
        description="t^{1/β} on (0,1] composed with e^{-t} against dt: tail w^β/β - log w - 1/β",
        validity="β > 0; image measure infinite near 0",
        finite=False,
        tail=_power_exp_tail,
        defaults={"beta": 1.0},
        constituents=lambda beta: [_unit_power(1.0 / beta), _class_l()],
        canonical=lambda beta: IntegralMap(
            h=linear(-1.0),
            r=elementary([(1.0 / beta, beta, 0.0)], offset=-1.0 / beta, log_coef=-1.0),
            b=1.0,
        ),
        alternates=lambda beta: [
            IntegralMap(
                h=exp_decay(),
                r=elementary([(1.0, 1.0, 0.0), (1.0 / beta, 0.0, beta)], offset=-1.0 / beta),
            )
        ],
        infer=_infer_power_exp,
        check=_positive("beta"),
    ),
    "gamma_clock": CatalogEntry(
        name="gamma_clock",
        description="t against Γ(α;t) composed with e^{-t} against dt: tail ∫_w^∞ Γ(α;s) ds/s",
        validity="any real α; image measure infinite near 0",
        finite=False,
        tail=_gamma_clock_tail,
        defaults={"alpha": 1.0},
        constituents=lambda alpha: [IntegralMap(h=linear(), r=gamma_tail(alpha)), _class_l()],
        canonical=lambda alpha: IntegralMap(h=linear(), r=gamma_tail_integral(alpha)),
        infer=_infer_gamma,
    ),
    "euler_gamma0": CatalogEntry(
        name="euler_gamma0",
        description="Γ(0;w) by the Euler-constant series -C - log w - Σ(-w)^k/(k·k!), continued fraction for w > 2",
        validity="w > 0",
        finite=False,
        tail=_thorin_tail,
    ),
}


def get_entry(name: str) -> CatalogEntry:
    """Get a catalog entry by name.

    Args:
        name: Entry name.

    Returns:
        The catalog entry.

    Raises:
        KeyError: If entry not found.
    """
    if name not in ENTRIES:
        available = ", ".join(ENTRIES.keys())
        msg = f"Unknown catalog entry '{name}'. Available: {available}"
        raise KeyError(msg)
    return ENTRIES[name]


def list_entries() -> list[str]:
    """List all catalog entry names."""
    return list(ENTRIES.keys())


def catalog() -> list[CatalogEntry]:
    return list(ENTRIES.values())


def constituents(entry: CatalogEntry, params: Params | None = None) -> list[IntegralMap]:
    if entry.constituents is None:
        return []
    return entry.constituents(**entry.resolve(params))


def canonical_map(entry: CatalogEntry, params: Params | None = None) -> IntegralMap | None:
    if entry.canonical is None:
        return None
    return entry.canonical(**entry.resolve(params))


def alternate_maps(entry: CatalogEntry, params: Params | None = None) -> list[IntegralMap]:
    return entry.alternates(**entry.resolve(params))


def entry_tail(entry: CatalogEntry, w: float, params: Params | None = None) -> float:
    """Closed-form tail hρ{|x| > w} for w > 0."""
    if w <= 0:
        return math.inf if not entry.finite else entry.tail(0.0, **entry.resolve(params))
    return float(entry.tail(w, **entry.resolve(params)))


# --- matching -----------------------------------------------------------------------


def _rounded(value: Any) -> Any:
    if isinstance(value, float) and math.isfinite(value) and value != 0:
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _rounded(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_rounded(v) for v in value]
    return value


def fingerprint(m: IntegralMap) -> str:
    """Canonical text of a map, floats rounded to 12 significant digits."""
    return json.dumps(_rounded(m.model_dump(mode="json")), sort_keys=True)


def match(maps: list[IntegralMap]) -> tuple[CatalogEntry, Params] | None:
    """Catalog entry whose constituents equal ``maps`` in some order."""
    if any(m.is_opaque for m in maps):
        return None
    wanted = sorted(fingerprint(m) for m in maps)
    for entry in ENTRIES.values():
        if entry.is_evaluator:
            continue
        params = entry.infer(maps)
        if params is None:
            continue
        try:
            candidates = constituents(entry, params)
        except (InputError, ValueError):
            continue
        if sorted(fingerprint(m) for m in candidates) == wanted:
            return entry, entry.resolve(params)
    return None


# --- shipped registry ------------------------------------------------------------------


def _get_registry_dir() -> Path:
    """Get the shipped registry directory."""
    return Path(__file__).parent / "registry"


def registry_path(version: str = CATALOG_VERSION) -> Path:
    """Path to the shipped JSON registry.

    Raises:
        ValueError: If no registry of that version is shipped.
    """
    path = _get_registry_dir() / f"catalog_{version}.json"
    if not path.exists():
        msg = f"No catalog registry '{version}' at {path}"
        raise ValueError(msg)
    return path


def export_catalog() -> dict[str, Any]:
    """The registry as plain data, maps at default parameters."""
    entries = []
    for entry in ENTRIES.values():
        canonical = canonical_map(entry)
        entries.append(
            {
                "name": entry.name,
                "description": entry.description,
                "validity": entry.validity,
                "finite": entry.finite,
                "defaults": dict(entry.defaults),
                "constituents": [m.model_dump(mode="json") for m in constituents(entry)],
                "canonical": None if canonical is None else canonical.model_dump(mode="json"),
                "alternates": [m.model_dump(mode="json") for m in alternate_maps(entry)],
            }
        )
    return {"version": CATALOG_VERSION, "entries": entries}


def load_registry(version: str = CATALOG_VERSION) -> dict[str, Any]:
    return json.loads(registry_path(version).read_text(encoding="utf-8"))
