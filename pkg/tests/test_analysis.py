"""Tests for stable fixed points, factorization, the stochastic area and class tags."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from levicalc.analysis import (
    StableLaw,
    build_member,
    check_factorization,
    class_membership,
    class_preservation_scan,
    factorization_conditions,
    fixed_point_constant,
    get_class,
    image_interval,
    list_classes,
    multiplicativity_check,
    stochastic_area_identity,
    thorin_range_check,
    verify_fixed_point,
)
from levicalc.analysis.area import coth_excess, log_sinhc
from levicalc.analysis.classes import u_beta_map
from levicalc.errors import InputError, NotInDomainError, PreconditionError, UnsupportedError
from levicalc.experiments.fixtures import get_law, get_map
from levicalc.kernels import IntegralMap
from levicalc.kernels.clocks import lebesgue
from levicalc.kernels.transforms import const

Y = np.array([-2.0, -0.5, 0.5, 2.0])


class TestStableFixedPoints:
    """I(γ_p) = γ_p^{*c} with c = ∫|h|^p dρ."""

    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("p", [0.5, 1.0, 1.5, 2.0])
    def test_u_beta_constants(self, beta: float, p: float):
        assert fixed_point_constant(u_beta_map(beta), p) == pytest.approx(beta / (beta + p), abs=1e-8)

    def test_class_l_cauchy(self):
        report = verify_fixed_point(get_map("class_l"), StableLaw(index=1.0), Y)
        assert report.constant == pytest.approx(1.0)
        assert report.index_preserved
        assert report.passed

    def test_gaussian_is_index_two(self):
        report = verify_fixed_point(get_map("class_l"), StableLaw(index=2.0), Y)
        assert report.constant == pytest.approx(0.5)
        assert report.passed

    def test_divergent_constant(self):
        report = verify_fixed_point(get_map("inverse_cube"), StableLaw(index=1.5), Y)
        assert math.isinf(report.constant)
        assert not report.passed
        assert "diverges" in report.note

    def test_index_out_of_range(self):
        with pytest.raises(PreconditionError):
            fixed_point_constant(get_map("class_l"), 2.5)

    def test_stable_law_validation(self):
        with pytest.raises(ValidationError):
            StableLaw(index=1.0, symmetric=False)
        with pytest.raises(ValidationError):
            StableLaw(index=0.0)
        assert StableLaw(index=2.0, sigma=1.0).triple().gaussian_var == 2.0

    def test_preservation_scan(self):
        assert class_preservation_scan(get_map("class_l")).preserved
        report = class_preservation_scan(get_map("inverse_cube"), [0.5, 1.0])
        assert not report.preserved
        assert [row.finite for row in report.rows] == [False, False]

    @pytest.mark.slow
    def test_constants_multiply(self):
        """c(thorin, p) = Γ(p) = Γ(p+1)/p."""
        report = multiplicativity_check(
            get_map("class_l"), get_map("upsilon"), [0.5, 1.0, 2.0], atol=1e-6
        )
        assert report.passed
        assert report.rows[0].composed == pytest.approx(math.gamma(0.5), rel=1e-6)


class TestStochasticArea:
    """χ = φ·ψ with log φ the class-L image of log ψ."""

    def test_helpers_near_zero(self):
        x = np.array([0.0, 1e-5, 1.0])
        np.testing.assert_allclose(log_sinhc(x)[:2], [0.0, -(1e-10) / 6.0], atol=1e-15)
        assert log_sinhc(x)[2] == pytest.approx(math.log(1.0 / math.sinh(1.0)))
        assert coth_excess(x)[2] == pytest.approx(1.0 / math.tanh(1.0) - 1.0)

    @pytest.mark.parametrize("u", [0.5, 1.0, 2.0])
    def test_identity(self, u: float):
        report = stochastic_area_identity(u)
        assert report.passed
        assert report.max_integral_error < 1e-6

    def test_nonpositive_u(self):
        with pytest.raises(PreconditionError):
            stochastic_area_identity(0.0)


class TestFactorization:
    """I(ν) = I(λ) * λ with λ = I′(ν)."""

    def test_image_interval(self):
        assert image_interval(get_map("class_l")) == (0.0, 1.0)
        zero = IntegralMap(h=const(0.0), r=lebesgue(), b=1.0, allow_zero=True)
        assert image_interval(zero) is None

    def test_class_l_over_unit_linear(self):
        report = check_factorization(get_map("class_l"), get_map("unit_linear"), get_law("compound_poisson"), Y)
        assert report.conditions.image_condition
        assert report.conditions.tail_condition
        assert report.verdict == "holds"

    def test_trivial_factor_fails_condition(self):
        conditions = factorization_conditions(get_map("unit_linear"), get_map("identity"))
        assert not conditions.image_condition
        report = check_factorization(get_map("unit_linear"), get_map("identity"), get_law("gaussian"), Y)
        assert report.verdict == "condition_failed"

    def test_reversed_pair_fails_measure_condition(self):
        conditions = factorization_conditions(get_map("unit_linear"), get_map("class_l"))
        assert conditions.image_condition
        assert not conditions.tail_condition

    def test_outside_domain(self):
        with pytest.raises(NotInDomainError):
            check_factorization(get_map("class_l"), get_map("neg_log"), get_law("log_moment_infinite"), Y)

    @pytest.mark.slow
    def test_triple_route(self):
        report = check_factorization(
            get_map("class_l"), get_map("unit_linear"), get_law("gaussian"), Y, triple_route=True
        )
        assert report.holds
        assert report.route_discrepancy < 1e-6


class TestClasses:
    """Membership predicates and range builders."""

    def test_registry(self):
        assert list_classes() == [
            "ID_log",
            "ID_log_m",
            "ID_beta",
            "ID_2",
            "L",
            "L_m",
            "thorin",
            "E",
            "U_beta",
            "gamma_alpha",
        ]
        with pytest.raises(KeyError, match="Unknown class"):
            get_class("nope")

    @pytest.mark.parametrize(
        ("tag", "law", "member"),
        [
            ("ID_log", "compound_poisson", True),
            ("ID_log", "log_moment_infinite", False),
            ("ID_2", "compound_poisson", True),
            ("ID_2", "pareto2", False),
            ("L", "pareto2", True),
            ("E", "log_moment_infinite", True),
            ("thorin", "log_moment_infinite", False),
        ],
    )
    def test_membership(self, tag: str, law: str, member: bool):
        assert class_membership(tag, get_law(law)).member is member

    def test_negative_moment(self):
        report = class_membership("ID_beta", get_law("pareto2"), {"beta": -0.5})
        assert report.member
        assert report.value == pytest.approx(2.0, rel=1e-6)
        assert class_membership("ID_beta", get_law("pareto2"), {"beta": 0.5}).member

    def test_unsettled_orders(self):
        with pytest.raises(UnsupportedError):
            class_membership("ID_beta", get_law("pareto2"), {"beta": -1.5})
        with pytest.raises(InputError, match="exceed -2"):
            class_membership("U_beta", get_law("pareto2"), {"beta": -2.0})
        with pytest.raises(UnsupportedError):
            class_membership("gamma_alpha", get_law("pareto2"), {"alpha": -1.5})

    def test_symmetric_law_settles_low_orders(self):
        report = class_membership("ID_beta", get_law("stable_1_5"), {"beta": -1.2})
        assert report.member
        assert report.value == pytest.approx(2.0 / 0.3, rel=1e-9)

    def test_bad_parameters(self):
        with pytest.raises(InputError):
            class_membership("ID_log", get_law("gaussian"), {"m": 2.0})
        with pytest.raises(InputError, match="positive integer"):
            class_membership("L_m", get_law("gaussian"), {"m": 0.5})

    def test_build_member(self):
        assert build_member("L", get_law("gaussian")).gaussian_var == pytest.approx(0.5)
        assert build_member("U_beta", get_law("gaussian")).gaussian_var == pytest.approx(1.0 / 3.0)

    def test_build_member_needs_range_class(self):
        with pytest.raises(PreconditionError, match="moment class"):
            build_member("ID_2", get_law("gaussian"))

    def test_build_member_outside_domain(self):
        with pytest.raises(NotInDomainError):
            build_member("L", get_law("log_moment_infinite"))

    @pytest.mark.slow
    def test_thorin_range(self):
        assert thorin_range_check(get_law("compound_poisson"), Y, label="compound_poisson").passed
