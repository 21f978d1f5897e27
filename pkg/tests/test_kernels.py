"""Tests for space transforms, clocks and integral maps."""

import math
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from levicalc.errors import InputError, PreconditionError
from levicalc.kernels import (
    IntegralMap,
    classify,
    identity_map,
    load_map,
    p_functional,
    parse_map,
    reverse_clock,
    save_map,
)
from levicalc.kernels.clocks import (
    dirac,
    elementary,
    exp_clock,
    gamma_tail,
    lebesgue,
    log_clock,
    log_power,
    power_clock,
)
from levicalc.kernels.transforms import (
    const,
    exp_decay,
    linear,
    neg_log,
    opaque,
    power,
    power_complement,
)

MAPS_DIR = Path(__file__).parent.parent / "data" / "maps"


def class_l() -> IntegralMap:
    return load_map(MAPS_DIR / "class_l.json")


class TestTransforms:
    """Registered kinds evaluate, invert and scale."""

    @pytest.mark.parametrize(
        ("h", "t"),
        [
            (linear(2.0), 0.7),
            (power(-0.5, 3.0), 0.2),
            (exp_decay(2.0), 1.3),
            (neg_log(), 0.4),
            (power_complement(2.0, 0.5), 0.6),
        ],
    )
    def test_inverse(self, h, t: float):
        assert h.inverse(float(h(t))) == pytest.approx(t)

    def test_scaled_keeps_kind(self):
        h = exp_decay(1.5).scaled(-2.0)
        assert h.kind == "exp"
        assert float(h(0.0)) == pytest.approx(-2.0)

    def test_zero_and_constant(self):
        assert const(0.0).is_zero()
        assert const(3.0).is_constant()
        assert linear(0.0).is_zero()
        assert not neg_log().is_zero()

    def test_power_exponent_zero_rejected(self):
        with pytest.raises(ValidationError):
            power(0.0)

    def test_opaque_solve(self):
        h = opaque(lambda t: np.sin(t))
        roots = h.solve(0.5, 0.0, 3.0)
        assert roots == pytest.approx([math.pi / 6, 5 * math.pi / 6])


class TestClocks:
    """Clock values, limits and monotonicity."""

    def test_limits(self):
        assert power_clock(-3.0).at(0.0) == math.inf
        assert log_clock(-1.0).at(0.0) == math.inf
        assert exp_clock(coef=-1.0, offset=1.0).at(math.inf) == pytest.approx(1.0)
        assert gamma_tail(0.5).at(0.0) == pytest.approx(math.sqrt(math.pi))

    def test_direction(self):
        assert lebesgue().direction(0.0, 1.0) == "nondecreasing"
        assert log_clock(-1.0).direction(0.0, 1.0) == "nonincreasing"
        assert log_power(2.0).direction(0.0, 1.0) == "nonincreasing"
        assert lebesgue(slope=0.0).direction(0.0, 1.0) == "constant"

    def test_non_monotone_clock_rejected(self):
        with pytest.raises(ValueError, match="not monotone"):
            _cubic_clock().direction(0.0, 10.0)

    def test_gamma_density(self):
        clock = gamma_tail(1.5)
        assert float(clock.density(2.0)) == pytest.approx(math.sqrt(2.0) * math.exp(-2.0))

    def test_inverse(self):
        assert exp_clock(coef=-1.0, offset=1.0).inverse(0.5) == pytest.approx(math.log(2.0))
        assert power_clock(-3.0).inverse(8.0) == pytest.approx(0.5)
        assert log_power(1.0).inverse(1.0) == pytest.approx(math.exp(-1.0))

    def test_dirac_atoms(self):
        assert dirac(0.5).atoms(0.0, 1.0) == [(0.5, 1.0)]
        assert dirac(2.0).atoms(0.0, 1.0) == []


def _cubic_clock():
    # t - 2t² + t³ falls on (1/3, 1)
    return elementary([(1.0, 1.0, 0.0), (-2.0, 2.0, 0.0), (1.0, 3.0, 0.0)])


class TestIntegralMap:
    """Construction, orientation and level sets."""

    def test_fixture_maps_load(self):
        for path in sorted(MAPS_DIR.glob("*.json")):
            assert classify(load_map(path)) in {"identity", "generic"}, path.name

    def test_identity(self):
        assert classify(identity_map()) == "identity"
        assert classify(IntegralMap(h=const(1.0), r=dirac(0.5), b=1.0)) == "identity"
        assert classify(IntegralMap(h=const(2.0), r=dirac(0.5), b=1.0)) == "generic"

    def test_identity_needs_positive_orientation(self):
        m = IntegralMap(h=const(1.0), r=lebesgue(slope=-1.0, offset=1.0), b=1.0)
        assert m.orientation == -1.0
        assert classify(m) == "generic"

    def test_degenerate_rejected_unless_allowed(self):
        with pytest.raises(ValidationError, match="degenerate"):
            IntegralMap(h=const(0.0), r=lebesgue(), b=1.0)
        m = IntegralMap(h=const(0.0), r=lebesgue(), b=1.0, allow_zero=True)
        assert classify(m) == "zero"
        assert classify(class_l().with_scaled_h(0.0)) == "zero"

    def test_interval_checks(self):
        with pytest.raises(ValidationError):
            IntegralMap(h=linear(), r=lebesgue(), a=1.0, b=1.0)
        with pytest.raises(ValidationError, match="dirac"):
            IntegralMap(h=const(1.0), r=dirac(2.0), b=1.0)
        with pytest.raises(ValidationError, match="b ≤ 1"):
            IntegralMap(h=power_complement(1.0, 1.0), r=lebesgue(), b=2.0)

    def test_orientation_of_decreasing_clock(self):
        m = load_map(MAPS_DIR / "neg_log.json")
        assert m.direction == "nonincreasing"
        assert float(m.h_eff(0.5)) == pytest.approx(-0.5)

    def test_level_mass(self):
        m = class_l()
        assert m.level_mass(0.5) == pytest.approx(math.log(2.0))
        assert m.level_mass(0.5, upper=False) == 0.0
        assert m.crossings(0.5) == pytest.approx([math.log(2.0)])

    def test_h_sup(self):
        assert class_l().h_sup() == pytest.approx(1.0)
        assert load_map(MAPS_DIR / "unit_linear.json").h_sup() == pytest.approx(1.0)

    def test_restricted(self):
        m = class_l().restricted(1.0, 2.0)
        assert (m.a, m.b) == (1.0, 2.0)
        with pytest.raises(PreconditionError):
            class_l().restricted(-1.0, 2.0)

    def test_dirac_integration(self):
        m = IntegralMap(h=const(1.0), r=dirac(0.5), b=1.0)
        assert m.integrate(lambda t: t).value == pytest.approx(0.5)


class TestReverseClock:
    """Replacing a decreasing clock by r(a+) - r(t)."""

    def test_reverse_exp_clock(self):
        m = IntegralMap(h=linear(), r=exp_clock(), b=math.inf)
        flipped = reverse_clock(m)
        assert flipped.direction == "nondecreasing"
        assert flipped.reflected
        assert flipped.orientation == m.orientation
        assert flipped.radial.total_mass == pytest.approx(1.0)

    def test_infinite_anchor_rejected(self):
        with pytest.raises(PreconditionError, match="finite"):
            reverse_clock(load_map(MAPS_DIR / "neg_log.json"))

    def test_increasing_clock_rejected(self):
        with pytest.raises(PreconditionError, match="nonincreasing"):
            reverse_clock(class_l())


class TestRadialMeasure:
    """ρ = |dr| masses and sampling."""

    def test_masses(self):
        radial = load_map(MAPS_DIR / "thorin_half.json").radial
        assert radial.total_mass == pytest.approx(1.0)
        assert radial.tail(1.0) == pytest.approx(math.exp(-1.0))
        assert radial.cdf(1.0) == pytest.approx(1.0 - math.exp(-1.0))

    def test_quantile(self):
        u = np.array([0.1, 0.5, 0.9])
        np.testing.assert_allclose(identity_map().radial.quantile(u), u)
        np.testing.assert_allclose(
            load_map(MAPS_DIR / "thorin_half.json").radial.quantile(u), -np.log1p(-u)
        )

    def test_infinite_mass_cannot_be_sampled(self):
        with pytest.raises(PreconditionError, match="cannot sample"):
            class_l().radial.quantile(np.array([0.5]))


class TestPFunctional:
    """∫ |h|^p dρ, the mass that decides the image condition."""

    @pytest.mark.parametrize(
        ("name", "p", "expected"),
        [
            ("class_l", 1.0, 1.0),
            ("class_l", 2.0, 0.5),
            ("unit_linear", 2.0, 1.0 / 3.0),
            ("thorin_half", 1.0, 1.0),
            ("inverse_cube", 4.0, 3.0),
        ],
    )
    def test_values(self, name: str, p: float, expected: float):
        assert p_functional(load_map(MAPS_DIR / f"{name}.json"), p) == pytest.approx(expected, rel=1e-7)

    def test_divergent(self):
        assert p_functional(load_map(MAPS_DIR / "inverse_cube.json"), 2.0) == math.inf

    def test_point_clock(self):
        m = IntegralMap(h=linear(3.0), r=dirac(0.5), b=1.0)
        assert p_functional(m, 2.0) == pytest.approx(2.25)


class TestMapFiles:
    """JSON load and save of maps."""

    def test_save_and_load(self, tmp_path: Path):
        path = save_map(class_l(), tmp_path / "map.json")
        loaded = load_map(path)
        assert loaded == class_l()
        assert math.isinf(loaded.b)

    def test_opaque_not_serializable(self, tmp_path: Path):
        m = IntegralMap(h=opaque(np.cos), r=lebesgue(), b=1.0)
        with pytest.raises(InputError, match="opaque"):
            save_map(m, tmp_path / "map.json")

    def test_parse_invalid(self):
        with pytest.raises(InputError, match="invalid map"):
            parse_map({"h": {"kind": "linear"}, "r": {"kind": "nope"}})

    def test_load_missing(self, tmp_path: Path):
        with pytest.raises(InputError, match="cannot read"):
            load_map(tmp_path / "absent.json")
