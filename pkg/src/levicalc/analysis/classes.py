"""Named classes of infinitely divisible laws.

Moment classes (ID_log, ID_log^m, ID_β, ID_2) are decided by their moment
condition. Range classes (L, L_m, U_β, Thorin T, E and the Γ(α; t) clock
class) carry a defining map: membership is tested on the domain of that map,
and :func:`build_member` applies the map to produce a member.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from pydantic import Field

from levicalc.compose.catalog import canonical_map, get_entry
from levicalc.compose.equivalence import nested_exponent
from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import InputError, PreconditionError, UnsupportedError
from levicalc.kernels.clocks import exp_clock, gamma_tail, lebesgue, power_clock
from levicalc.kernels.mapping import IntegralMap
from levicalc.kernels.transforms import exp_decay, linear
from levicalc.measures.levy import ImageMeasure, LevyMeasure, MixtureMeasure
from levicalc.measures.triple import LevyTriple, tail_moment
from levicalc.numerics.grids import DEFAULT_Y_GRID
from levicalc.reporting.schema import ReportModel
from levicalc.transform.exponent import transform_exponent
from levicalc.transform.triple import transform_triple

logger = logging.getLogger(__name__)

ClassId = Literal["L", "L_m", "U_beta", "thorin", "E", "gamma_alpha", "ID_log", "ID_log_m", "ID_beta", "ID_2"]

RANGE_ATOL = 1e-6

Params = dict[str, float]


# --- defining maps ---------------------------------------------------------------------


def class_l_map() -> IntegralMap:
    """e^{-t} against dt on (0, ∞)."""
    return IntegralMap(h=exp_decay(), r=lebesgue())


def class_lm_map(m: float) -> IntegralMap:
    """e^{-t} against t^m/m! on (0, ∞)."""
    return IntegralMap(h=exp_decay(), r=power_clock(m, 1.0 / math.factorial(int(m))))


def upsilon_map() -> IntegralMap:
    """t against 1 - e^{-t} on (0, ∞)."""
    return IntegralMap(h=linear(), r=exp_clock(rate=1.0, coef=-1.0, offset=1.0))


def thorin_map() -> IntegralMap:
    return canonical_map(get_entry("thorin"))


def u_beta_map(beta: float) -> IntegralMap:
    """t against t^β on (0, 1]."""
    return IntegralMap(h=linear(), r=power_clock(beta), b=1.0)


def gamma_alpha_map(alpha: float) -> IntegralMap:
    """t against Γ(α; t) on (0, ∞)."""
    return IntegralMap(h=linear(), r=gamma_tail(alpha))


# --- predicates --------------------------------------------------------------------------


class MembershipReport(ReportModel):
    """Outcome of :func:`class_membership`."""

    tag: str
    params: Params = Field(default_factory=dict)
    member: bool
    criterion: str
    value: float | None = None
    note: str = ""


def _opaque(levy: LevyMeasure) -> bool:
    if isinstance(levy, ImageMeasure):
        return levy.mapping.is_opaque or _opaque(levy.base)
    if isinstance(levy, MixtureMeasure):
        return any(_opaque(part) for part in levy.parts)
    return False


def _moment(tag: str, name: str, t: LevyTriple, params: Params, tol: Tolerance, note: str = "") -> MembershipReport:
    report = tail_moment(t, name, tol)
    return MembershipReport(
        tag=tag,
        params=params,
        member=report.finite,
        criterion=f"∫_{{|x|>1}} {name} M(dx) < ∞",
        value=report.value,
        note=note,
    )


def _everything(tag: str, params: Params, note: str) -> MembershipReport:
    return MembershipReport(tag=tag, params=params, member=True, criterion="ID", note=note)


def _log_m(tag: str, t: LevyTriple, params: Params, tol: Tolerance, note: str = "") -> MembershipReport:
    m = params["m"]
    return _moment(tag, "log" if m == 1 else f"log^{m:g}", t, params, tol, note)


def _negative_moment(tag: str, t: LevyTriple, params: Params, tol: Tolerance, order: float, note: str) -> MembershipReport:
    """∫_{|x|>1} |x|^{-order} M(dx) for -2 < order < 0; symmetric laws only below -1."""
    if order <= -2:
        raise InputError(f"moment order must exceed -2, got {order:g}")
    if order <= -1 and not t.is_symmetric():
        raise UnsupportedError(
            f"the condition for order {order:g} ≤ -1 is only settled for symmetric laws"
        )
    return _moment(tag, f"power:{-order:g}", t, params, tol, note)


def _id_beta(t: LevyTriple, params: Params, tol: Tolerance) -> MembershipReport:
    beta = params["beta"]
    if beta >= 0:
        return _everything("ID_beta", params, "β ≥ 0 imposes no condition")
    return _negative_moment("ID_beta", t, params, tol, beta, "")


def _u_beta(t: LevyTriple, params: Params, tol: Tolerance) -> MembershipReport:
    beta = params["beta"]
    note = "domain of t against t^β on (0, 1]"
    if beta > 0:
        return _everything("U_beta", params, note)
    return _negative_moment("U_beta", t, params, tol, beta, note)


def _gamma_alpha(t: LevyTriple, params: Params, tol: Tolerance) -> MembershipReport:
    alpha = params["alpha"]
    note = "domain of t against Γ(α; t) on (0, ∞)"
    if alpha > 0:
        return _everything("gamma_alpha", params, note)
    if alpha == 0:
        return _moment("gamma_alpha", "log", t, params, tol, note)
    if alpha <= -1:
        raise UnsupportedError(f"no domain description for α = {alpha:g} ≤ -1")
    return _negative_moment("gamma_alpha", t, params, tol, alpha, note)


def _nonzero_beta(params: Params) -> None:
    if params["beta"] == 0:
        raise InputError("β must be nonzero")


def _order(params: Params) -> None:
    m = params["m"]
    if m < 1 or m != int(m):
        raise InputError(f"m must be a positive integer, got {m}")


@dataclass(frozen=True)
class ClassTag:
    """A named class with its membership predicate and, for ranges, its defining map."""

    id: ClassId
    description: str
    predicate: Callable[[LevyTriple, Params, Tolerance], MembershipReport]
    defining_map: Callable[[Params], IntegralMap] | None = None
    defaults: Params = field(default_factory=dict)
    check: Callable[[Params], None] = lambda _params: None

    def resolve(self, params: Params | None = None) -> Params:
        resolved = {**self.defaults, **(params or {})}
        unknown = set(resolved) - set(self.defaults)
        if unknown:
            raise InputError(f"class {self.id} takes no parameter(s) {sorted(unknown)}")
        self.check(resolved)
        return resolved


# Class registry
CLASS_TAGS: dict[str, ClassTag] = {
    "ID_log": ClassTag(
        id="ID_log",
        description="finite log moment of M outside the unit ball",
        predicate=lambda t, p, tol: _moment("ID_log", "log", t, p, tol),
    ),
    "ID_log_m": ClassTag(
        id="ID_log_m",
        description="finite m-th power log moment of M outside the unit ball",
        predicate=lambda t, p, tol: _log_m("ID_log_m", t, p, tol),
        defaults={"m": 2.0},
        check=_order,
    ),
    "ID_beta": ClassTag(
        id="ID_beta",
        description="finite moment |x|^{-β} of M outside the unit ball, -2 < β < 0",
        predicate=_id_beta,
        defaults={"beta": -0.5},
        check=_nonzero_beta,
    ),
    "ID_2": ClassTag(
        id="ID_2",
        description="finite second moment of M outside the unit ball",
        predicate=lambda t, p, tol: _moment("ID_2", "second", t, p, tol),
    ),
    "L": ClassTag(
        id="L",
        description="selfdecomposable laws: range of e^{-t} against dt on ID_log",
        predicate=lambda t, p, tol: _moment("L", "log", t, p, tol, "domain of e^{-t} against dt"),
        defining_map=lambda _p: class_l_map(),
    ),
    "L_m": ClassTag(
        id="L_m",
        description="m-times selfdecomposable laws: range of e^{-t} against t^m/m! on ID_log^m",
        predicate=lambda t, p, tol: _log_m("L_m", t, p, tol, "domain of e^{-t} against t^m/m!"),
        defining_map=lambda p: class_lm_map(p["m"]),
        defaults={"m": 2.0},
        check=_order,
    ),
    "thorin": ClassTag(
        id="thorin",
        description="Thorin class T: range of t against Γ(0; t) on ID_log",
        predicate=lambda t, p, tol: _moment("thorin", "log", t, p, tol, "domain of t against Γ(0; t)"),
        defining_map=lambda _p: thorin_map(),
    ),
    "E": ClassTag(
        id="E",
        description="class E: range of t against 1 - e^{-t} on ID",
        predicate=lambda _t, p, _tol: _everything("E", p, "domain of t against 1 - e^{-t}"),
        defining_map=lambda _p: upsilon_map(),
    ),
    "U_beta": ClassTag(
        id="U_beta",
        description="range of t against t^β on (0, 1]",
        predicate=_u_beta,
        defining_map=lambda p: u_beta_map(p["beta"]),
        defaults={"beta": 1.0},
        check=_nonzero_beta,
    ),
    "gamma_alpha": ClassTag(
        id="gamma_alpha",
        description="range of t against Γ(α; t) on (0, ∞)",
        predicate=_gamma_alpha,
        defining_map=lambda p: gamma_alpha_map(p["alpha"]),
        defaults={"alpha": 1.0},
    ),
}


def get_class(tag: str) -> ClassTag:
    """Get a class tag by id.

    Raises:
        KeyError: If the tag is not registered.
    """
    if tag not in CLASS_TAGS:
        available = ", ".join(CLASS_TAGS.keys())
        msg = f"Unknown class '{tag}'. Available: {available}"
        raise KeyError(msg)
    return CLASS_TAGS[tag]


def list_classes() -> list[str]:
    return list(CLASS_TAGS.keys())


def class_membership(
    tag: str, t: LevyTriple, params: Params | None = None, tol: Tolerance = DEFAULT_TOLERANCE
) -> MembershipReport:
    """Evaluate the tag's predicate on a triple.

    Raises:
        KeyError: If the tag is unknown.
        InputError: For invalid tag parameters.
        UnsupportedError: If the Lévy measure involves an opaque transform, or
            the predicate is not settled for this law.
    """
    entry = get_class(tag)
    resolved = entry.resolve(params)
    if _opaque(t.levy):
        raise UnsupportedError(f"class {tag} cannot be decided for an opaque Lévy measure")
    report = entry.predicate(t, resolved, tol)
    logger.debug("class %s: member=%s (%s)", tag, report.member, report.criterion)
    return report


def build_member(
    tag: str, t: LevyTriple, params: Params | None = None, tol: Tolerance = DEFAULT_TOLERANCE
) -> LevyTriple:
    """Apply the defining map of a range class to ν.

    Raises:
        PreconditionError: If the class is a moment class without a defining map.
        NotInDomainError: If ν is outside the domain of the defining map.
    """
    entry = get_class(tag)
    if entry.defining_map is None:
        raise PreconditionError(f"class {tag} is a moment class without a defining map")
    return transform_triple(entry.defining_map(entry.resolve(params)), t, tol)


class RangeReport(ReportModel):
    """T ⊂ L ∩ E checked through both composition orders."""

    law: str
    l_route: float
    e_route: float
    atol: float
    passed: bool


def thorin_range_check(
    nu: LevyTriple,
    y_grid: Sequence[float] = DEFAULT_Y_GRID,
    tol: Tolerance = DEFAULT_TOLERANCE,
    atol: float = RANGE_ATOL,
    *,
    label: str = "",
) -> RangeReport:
    """Rebuild the Thorin member of ν as a class-L image and as a class-E image.

    The Thorin image equals I_L(I_E(ν)), a member of L, and I_E(I_L(ν)), a
    member of E.
    """
    y = np.asarray(y_grid, dtype=float)
    phi = nu.exponent(tol)
    target = transform_exponent(thorin_map(), phi, tol)(y)
    through_l = nested_exponent([class_l_map(), upsilon_map()], phi, tol)(y)
    through_e = nested_exponent([upsilon_map(), class_l_map()], phi, tol)(y)
    l_route = float(np.max(np.abs(through_l - target)))
    e_route = float(np.max(np.abs(through_e - target)))
    return RangeReport(
        law=label,
        l_route=l_route,
        e_route=e_route,
        atol=atol,
        passed=l_route <= atol and e_route <= atol,
    )
