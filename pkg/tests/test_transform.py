"""Tests for domain checks and the action of integral maps on laws."""

import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from levicalc.errors import NotInDomainError, PreconditionError
from levicalc.experiments.fixtures import get_law, get_map
from levicalc.kernels import IntegralMap, classify, p_functional, reverse_clock
from levicalc.kernels.clocks import DiracClock, dirac, exp_clock, lebesgue, power_clock
from levicalc.kernels.transforms import exp_decay, linear
from levicalc.measures import (
    LevyTriple,
    atomic,
    convolution_power,
    convolve,
    dilate,
    levy_exponent,
    reflect,
)
from levicalc.transform import (
    domain_check,
    log_moment_order,
    retrieval_limit_check,
    separating_level,
    tail_table,
    transform_exponent,
    transform_triple,
    write_tail_csv,
)

Y = np.array([-2.0, -0.5, 0.5, 2.0])

# Kinks of the unit_linear image tails sit on the atom lattice, so the images of
# distinct lattice measures differ at one of these levels.
LEVELS = [0.25 * k for k in range(1, 18)]


@st.composite
def atom_sets(draw) -> dict[float, float]:
    sites = st.sampled_from([0.5 * k * s for k in range(1, 9) for s in (1, -1)])
    weights = st.sampled_from([0.25 * k for k in range(1, 9)])
    return draw(st.dictionaries(sites, weights, max_size=4))


class TestDomainCheck:
    """Shortcuts first, then every applicable criterion."""

    def test_finite_clock_admits_everything(self):
        report = domain_check(get_map("unit_linear"), get_law("log_moment_infinite"))
        assert report.admitted
        assert report.shortcut_used == "prop3_finite_clock"

    def test_stable_shortcut(self):
        report = domain_check(get_map("class_l"), get_law("cauchy"))
        assert report.admitted
        assert report.shortcut_used == "prop6_stable"
        assert report.checks[0].value == pytest.approx(1.0)

    def test_stable_shortcut_rejects(self):
        report = domain_check(get_map("inverse_cube"), get_law("stable_1_5"))
        assert not report.admitted
        assert report.failed() == ["prop6_stable"]

    def test_second_moment_shortcut(self):
        report = domain_check(get_map("neg_log"), get_law("compound_poisson"))
        assert report.admitted
        assert report.shortcut_used == "prop5_second_moment"
        assert report.checks[0].value == pytest.approx(8.5)

    def test_log_moment_rejects(self):
        report = domain_check(get_map("neg_log"), get_law("log_moment_infinite"))
        assert not report.admitted
        assert report.shortcut_used is None
        assert "example1_logmoment" in report.failed()

    def test_class_l_rejects_through_log_moment(self):
        report = domain_check(get_map("class_l"), get_law("log_moment_infinite"))
        assert not report.admitted
        log_check = next(c for c in report.checks if c.criterion == "example1_logmoment")
        assert log_check.verdict == "fail"
        assert log_check.value == math.inf

    def test_log_moment_admits_pareto(self):
        report = domain_check(get_map("neg_log"), get_law("pareto2"))
        assert report.admitted
        names = [c.criterion for c in report.checks]
        assert names == ["cor2_necessary", "example1_logmoment", "cor4_iii", "prop4_compensator"]

    def test_gaussian_needs_square_integrable_h(self):
        report = domain_check(get_map("inverse_cube"), get_law("gaussian"))
        assert not report.admitted
        assert report.failed() == ["prop4_gaussian"]

    def test_point_mass_at_zero(self):
        assert domain_check(get_map("inverse_cube"), LevyTriple()).admitted

    def test_report_serializes_infinity(self):
        report = domain_check(get_map("neg_log"), get_law("log_moment_infinite"))
        assert '"Infinity"' in report.model_dump_json()


class TestLogMomentOrder:
    """Maps whose domain is a log-moment class."""

    def test_orders(self):
        assert log_moment_order(get_map("class_l")) == 1.0
        assert log_moment_order(get_map("neg_log")) == 1.0
        assert log_moment_order(IntegralMap(h=exp_decay(), r=power_clock(2.0))) == 2.0
        assert log_moment_order(get_map("unit_linear")) is None


class TestTransformTriple:
    """Closed forms for the image triple."""

    def test_identity_returns_input(self):
        t = get_law("compound_poisson")
        assert transform_triple(get_map("identity"), t) is t

    @pytest.mark.parametrize(("name", "expected"), [("unit_linear", 1.0 / 3.0), ("class_l", 0.5)])
    def test_gaussian_variance(self, name: str, expected: float):
        out = transform_triple(get_map(name), get_law("gaussian"))
        assert out.gaussian_var == pytest.approx(expected)
        assert out.shift == 0.0

    @pytest.mark.parametrize(("name", "expected"), [("unit_linear", 1.0), ("class_l", 2.0)])
    def test_shift(self, name: str, expected: float):
        assert transform_triple(get_map(name), get_law("shift")).shift == pytest.approx(expected)

    def test_stable_stays_closed_form(self):
        out = transform_triple(get_map("unit_linear"), get_law("cauchy"))
        np.testing.assert_allclose(levy_exponent(out, Y), -0.5 * np.abs(Y), atol=1e-10)

    def test_point_clock_dilates(self):
        m = IntegralMap(h=linear(), r=dirac(0.5), b=1.0)
        assert transform_triple(m, get_law("gaussian")).gaussian_var == pytest.approx(0.25)

    def test_heavy_point_clock_runs_law_longer(self, monkeypatch):
        """A jump of mass 2 at u gives the law run for two time units, scaled by h(u)."""
        monkeypatch.setattr(DiracClock, "atoms", lambda self, a, b: [(self.params.at, 2.0)])
        m = IntegralMap(h=linear(), r=dirac(0.5), b=1.0)
        t = LevyTriple(shift=0.5, gaussian_var=1.0, levy=atomic((1.0, 1.0)))

        out = transform_triple(m, t)

        assert classify(m) == "generic"
        assert out.gaussian_var == pytest.approx(p_functional(m, 2.0))
        assert out.gaussian_var == pytest.approx(0.5)
        np.testing.assert_allclose(
            levy_exponent(out, Y), 2.0 * levy_exponent(dilate(t, 0.5), Y), atol=1e-10
        )

    def test_outside_domain(self):
        with pytest.raises(NotInDomainError) as exc:
            transform_triple(get_map("neg_log"), get_law("log_moment_infinite"))
        assert exc.value.report is not None
        assert exc.value.exit_code == 3

    def test_matches_exponent_route(self):
        m, t = get_map("unit_linear"), get_law("compound_poisson")
        via_triple = levy_exponent(transform_triple(m, t), Y)
        via_exponent = transform_exponent(m, t.exponent())(Y)
        np.testing.assert_allclose(via_triple, via_exponent, atol=1e-6)

    def test_homomorphism(self):
        """The image of a convolution is the convolution of the images."""
        m = get_map("unit_linear")
        first = get_law("compound_poisson")
        second = LevyTriple(shift=0.7, gaussian_var=0.4, levy=atomic((-1.5, 0.8)))
        joint = levy_exponent(transform_triple(m, convolve(first, second)), Y)
        apart = levy_exponent(transform_triple(m, first), Y)
        apart = apart + levy_exponent(transform_triple(m, second), Y)
        np.testing.assert_allclose(joint, apart, atol=1e-9)

    def test_scaled_clock_is_convolution_power(self):
        t = get_law("compound_poisson")
        image = transform_triple(get_map("unit_linear"), t)
        scaled = transform_triple(IntegralMap(h=linear(), r=lebesgue(slope=2.5), b=1.0), t)
        np.testing.assert_allclose(
            levy_exponent(scaled, Y), levy_exponent(convolution_power(image, 2.5), Y), atol=1e-9
        )

    @pytest.mark.parametrize("u", [2.0, -1.5])
    def test_scaled_integrand_is_dilation(self, u: float):
        m, t = get_map("unit_linear"), get_law("compound_poisson")
        stretched = transform_triple(m.with_scaled_h(u), t)
        dilated = dilate(transform_triple(m, t), u)
        np.testing.assert_allclose(levy_exponent(stretched, Y), levy_exponent(dilated, Y), atol=1e-9)

    def test_decreasing_clock_acts_on_reflected_law(self):
        t = get_law("compound_poisson")
        decreasing = IntegralMap(h=linear(), r=exp_clock(), b=math.inf)
        direct = levy_exponent(transform_triple(decreasing, t), Y)
        reversed_form = levy_exponent(transform_triple(reverse_clock(decreasing), t), Y)
        on_reflection = levy_exponent(transform_triple(get_map("thorin_half"), reflect(t)), Y)
        np.testing.assert_allclose(direct, reversed_form, atol=1e-9)
        np.testing.assert_allclose(direct, on_reflection, atol=1e-9)


class TestTransformExponent:
    """Φ ↦ ∫ Φ(h_eff(t)y) dρ."""

    def test_gaussian(self):
        phi = transform_exponent(get_map("unit_linear"), get_law("gaussian").exponent())
        np.testing.assert_allclose(phi(Y), -(Y**2) / 6.0, atol=1e-10)

    def test_class_l_cauchy(self):
        phi = transform_exponent(get_map("class_l"), get_law("cauchy").exponent())
        np.testing.assert_allclose(phi(Y), -np.abs(Y), atol=1e-8)
        assert phi.stable_index == 1.0

    def test_zero_argument(self):
        phi = transform_exponent(get_map("class_l"), get_law("gaussian").exponent())
        assert phi(0.0) == 0.0

    def test_divergence_reports_y(self):
        phi = transform_exponent(get_map("inverse_cube"), get_law("gaussian").exponent())
        with pytest.raises(NotInDomainError) as exc:
            phi(1.0)
        assert exc.value.y == pytest.approx(1.0)


class TestTails:
    """Image tails and separation of distinct laws."""

    def test_tail_table(self, tmp_path: Path):
        rows = tail_table(get_law("pareto2").levy, [1.0, 2.0, 4.0])
        assert [r[1] for r in rows] == pytest.approx([1.0, 0.5, 0.25], abs=1e-8)
        assert all(r[2] == 0.0 for r in rows)
        path = write_tail_csv(rows, tmp_path / "tails.csv")
        assert path.read_text().splitlines()[0] == "w,upper,lower"

    def test_separating_level(self):
        m = get_map("unit_linear")
        first, second = atomic((1.0, 1.0)), atomic((2.0, 1.0))
        assert separating_level(m, first, second, [0.1, 0.5]) == pytest.approx(0.1)
        assert separating_level(m, first, atomic((1.0, 1.0)), [0.1, 0.5]) is None

    @settings(max_examples=25, deadline=None)
    @given(atom_sets(), atom_sets())
    def test_distinct_atomic_laws_separate(self, first: dict[float, float], second: dict[float, float]):
        assume(first != second)
        m = get_map("unit_linear")
        assert separating_level(m, atomic(*first.items()), atomic(*second.items()), LEVELS) is not None

    @settings(max_examples=25, deadline=None)
    @given(atom_sets())
    def test_equal_atomic_laws_do_not_separate(self, atoms: dict[float, float]):
        m = get_map("unit_linear")
        assert separating_level(m, atomic(*atoms.items()), atomic(*atoms.items()), LEVELS) is None


class TestRetrieval:
    """Averaging the integrand near c recovers Φ."""

    def test_class_l_gaussian(self):
        report = retrieval_limit_check(
            get_map("class_l"), get_law("gaussian").exponent(), 1.0, [2.0, 1.5, 1.1, 1.01]
        )
        assert report.monotone
        assert report.rows[-1].error < report.rows[0].error
        assert report.order == pytest.approx(1.0, abs=0.25)

    def test_point_outside(self):
        with pytest.raises(PreconditionError, match="inside"):
            retrieval_limit_check(get_map("class_l"), get_law("gaussian").exponent(), 0.0, [1.0])

    def test_bad_sequence(self):
        with pytest.raises(PreconditionError):
            retrieval_limit_check(get_map("unit_linear"), get_law("gaussian").exponent(), 0.5, [0.4])

    def test_finite_interval(self):
        report = retrieval_limit_check(
            get_map("unit_linear"), get_law("gaussian").exponent(), 0.5, [1.0, 0.75]
        )
        assert math.isfinite(report.rows[0].error)
