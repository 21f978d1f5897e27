"""Tests for Lévy measures, triples and exponents."""

import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from levicalc.errors import InputError
from levicalc.measures import (
    Atom,
    DensityMeasure,
    DensityPiece,
    ExponentFn,
    Growth,
    LevyTriple,
    MixtureMeasure,
    atomic,
    check_exponent_invariants,
    convolution_power,
    convolve,
    dilate,
    gamma_measure,
    levy_exponent,
    load_triple,
    log_moment_finite,
    parse_triple,
    reflect,
    save_triple,
    stable_coef,
    stable_measure,
    stable_sigma,
    tail_moment,
)

LAWS_DIR = Path(__file__).parent.parent / "data" / "laws"
Y = np.array([-3.0, -1.0, -0.25, 0.25, 1.0, 3.0])


def compound_poisson() -> LevyTriple:
    return LevyTriple(levy=atomic((2.0, 1.0), (-0.5, 2.0), (3.0, 0.5)))


def pareto2() -> LevyTriple:
    return LevyTriple(levy=DensityMeasure(pieces=(DensityPiece(lo=1.0, coef=1.0, power=2.0),)))


@st.composite
def atomic_triples(draw) -> LevyTriple:
    n = draw(st.integers(min_value=0, max_value=4))
    atoms = []
    for _ in range(n):
        x = draw(st.floats(min_value=0.05, max_value=5.0)) * draw(st.sampled_from([1.0, -1.0]))
        atoms.append((x, draw(st.floats(min_value=0.01, max_value=3.0))))
    return LevyTriple(
        shift=draw(st.floats(min_value=-2.0, max_value=2.0)),
        gaussian_var=draw(st.floats(min_value=0.0, max_value=2.0)),
        levy=atomic(*atoms),
    )


class TestExponentExamples:
    """Closed-form exponents of the fixture laws."""

    def test_gaussian(self):
        assert levy_exponent(load_triple(LAWS_DIR / "gaussian.json"), 1.0) == pytest.approx(-0.5)

    def test_shift(self):
        assert levy_exponent(load_triple(LAWS_DIR / "shift.json"), 1.0) == pytest.approx(2.0j)

    def test_unit_atom_is_compensated(self):
        """The closed unit ball includes |x| = 1."""
        value = levy_exponent(load_triple(LAWS_DIR / "atom.json"), math.pi)
        assert value == pytest.approx(-2.0 - 1j * math.pi, abs=1e-12)

    def test_compound_poisson(self):
        t = compound_poisson()
        expected = (
            (np.exp(2j * Y) - 1.0)
            + 2.0 * (np.exp(-0.5j * Y) - 1.0 + 0.5j * Y)
            + 0.5 * (np.exp(3j * Y) - 1.0)
        )
        np.testing.assert_allclose(levy_exponent(t, Y), expected, atol=1e-12)

    def test_cauchy(self):
        t = load_triple(LAWS_DIR / "cauchy.json")
        np.testing.assert_allclose(levy_exponent(t, Y), -np.abs(Y), atol=1e-12)

    def test_gamma_matches_log_characteristic_function(self):
        """Gamma(1, 1) up to the compensator drift c(1 - e^{-λ})/λ."""
        t = LevyTriple(levy=gamma_measure(1.0, 1.0))
        drift = 1.0 - math.exp(-1.0)
        np.testing.assert_allclose(
            levy_exponent(t, Y) + 1j * Y * drift, -np.log(1.0 - 1j * Y), atol=1e-12
        )

    def test_scalar_and_array(self):
        t = compound_poisson()
        assert isinstance(levy_exponent(t, 1.0), complex)
        assert levy_exponent(t, np.array([1.0])).shape == (1,)


class TestStableParameters:
    """σ = 2cΓ(1-p)cos(πp/2)/p and its inverse."""

    def test_cauchy_limit(self):
        assert stable_sigma(1.0, 1.0 / math.pi) == pytest.approx(1.0)

    @pytest.mark.parametrize("p", [0.3, 0.5, 1.0, 1.5, 1.9])
    def test_roundtrip(self, p: float):
        assert stable_sigma(p, stable_coef(p, 2.5)) == pytest.approx(2.5)

    def test_stable_index(self):
        assert LevyTriple(levy=stable_measure(1.5, 1.0)).stable_index() == 1.5
        assert LevyTriple(gaussian_var=1.0).stable_index() == 2.0
        assert LevyTriple(shift=1.0, gaussian_var=1.0).stable_index() is None
        assert compound_poisson().stable_index() is None


class TestMeasureFunctionals:
    """Moments, tails and the mass functional."""

    def test_pareto_functionals(self):
        levy = pareto2().levy
        assert levy.mass_functional(1.0) == pytest.approx(1.0, abs=1e-8)
        assert levy.upper_tail(2.0) == pytest.approx(0.5, abs=1e-8)
        assert levy.lower_tail(2.0) == 0.0

    def test_log_moment_values(self):
        assert tail_moment(compound_poisson(), "log").value == pytest.approx(
            math.log(2.0) + 0.5 * math.log(3.0)
        )
        assert tail_moment(pareto2(), "log").value == pytest.approx(1.0, abs=1e-7)

    def test_second_moment(self):
        assert tail_moment(compound_poisson(), "second").value == pytest.approx(8.5)
        report = tail_moment(pareto2(), "second")
        assert not report.finite
        assert report.value == math.inf

    def test_power_moment(self):
        assert tail_moment(compound_poisson(), "power:0.5").value == pytest.approx(
            math.sqrt(2.0) + 0.5 * math.sqrt(3.0)
        )

    def test_infinite_log_moment(self):
        t = load_triple(LAWS_DIR / "log_moment_infinite.json")
        assert not log_moment_finite(t)
        assert tail_moment(t, "log").value == math.inf
        assert t.levy.mass_functional(1.0) == pytest.approx(1.0, abs=1e-6)

    def test_log_power_below_one_stays_finite(self):
        """∫_e^∞ (log x)^{1/2} dx/(x log²x) = 2, followed well past e^700."""
        t = load_triple(LAWS_DIR / "log_moment_infinite.json")
        assert tail_moment(t, "log^0.5").value == pytest.approx(2.0, rel=1e-6)

    def test_slow_power_moment_of_density(self):
        assert tail_moment(pareto2(), "power:0.7").value == pytest.approx(1.0 / 0.3, rel=1e-6)

    def test_stable_moments_in_closed_form(self):
        t = LevyTriple(levy=stable_measure(1.5, 1.0))
        assert tail_moment(t, "power:1.2").value == pytest.approx(2.0 / 0.3, rel=1e-12)
        assert tail_moment(t, "log").value == pytest.approx(2.0 / 1.5**2, rel=1e-12)
        assert tail_moment(t, "power:1.5").value == math.inf

    def test_growth_weight(self):
        g = Growth(power=2.0, log_power=1.0)
        assert float(g(np.asarray(math.e))) == pytest.approx(math.e**2)
        assert g.log_at(1000.0) == pytest.approx(2000.0 + math.log(1000.0))
        assert Growth(log_power=1.0).log_at(0.0) == -math.inf

    def test_unknown_moment(self):
        with pytest.raises(InputError, match="unknown moment"):
            tail_moment(compound_poisson(), "cubic")

    def test_stable_tails(self):
        levy = stable_measure(1.5, 1.0)
        assert levy.upper_tail(2.0) == pytest.approx(2.0**-1.5 / 1.5)
        assert levy.lower_tail(2.0) == levy.upper_tail(2.0)
        assert math.isinf(tail_moment(LevyTriple(levy=levy), "second").value)


class TestValidation:
    """Construction-time checks."""

    def test_atom_at_origin_rejected(self):
        with pytest.raises(ValidationError):
            Atom(x=0.0, mass=1.0)

    def test_nonpositive_mass_rejected(self):
        with pytest.raises(ValidationError):
            Atom(x=1.0, mass=0.0)

    def test_non_levy_density_rejected(self):
        """x^{-3} near 0 violates ∫(1 ∧ x²) M(dx) < ∞."""
        with pytest.raises(ValidationError):
            DensityMeasure(pieces=(DensityPiece(lo=0.0, hi=1.0, coef=1.0, power=3.0),))

    def test_negative_gaussian_variance_rejected(self):
        with pytest.raises(ValidationError):
            LevyTriple(gaussian_var=-1.0)

    def test_parse_invalid(self):
        with pytest.raises(InputError, match="invalid law"):
            parse_triple({"levy": {"kind": "unknown"}})

    def test_load_missing_file(self, tmp_path: Path):
        with pytest.raises(InputError, match="cannot read"):
            load_triple(tmp_path / "missing.json")


class TestAlgebra:
    """Convolution, powers, dilation and reflection act on exponents."""

    def test_convolve_adds_exponents(self):
        first, second = compound_poisson(), LevyTriple(shift=0.3, levy=gamma_measure(2.0, 0.5))
        both = convolve(first, second)
        assert isinstance(both.levy, MixtureMeasure)
        np.testing.assert_allclose(
            levy_exponent(both, Y), levy_exponent(first, Y) + levy_exponent(second, Y), atol=1e-12
        )

    def test_convolution_power(self):
        t = compound_poisson()
        np.testing.assert_allclose(
            levy_exponent(convolution_power(t, 2.5), Y), 2.5 * levy_exponent(t, Y), atol=1e-12
        )

    def test_negative_power_rejected(self):
        with pytest.raises(InputError):
            convolution_power(compound_poisson(), -1.0)

    @pytest.mark.parametrize("u", [0.3, -2.0, 1.0, 4.0])
    def test_dilate_atomic(self, u: float):
        t = convolve(compound_poisson(), LevyTriple(shift=0.7, gaussian_var=0.4))
        np.testing.assert_allclose(levy_exponent(dilate(t, u), Y), levy_exponent(t, u * Y), atol=1e-10)

    def test_dilate_gamma(self):
        t = LevyTriple(levy=gamma_measure(1.0, 1.0))
        np.testing.assert_allclose(levy_exponent(dilate(t, 2.0), Y), levy_exponent(t, 2.0 * Y), atol=1e-10)

    def test_reflect(self):
        t = compound_poisson()
        np.testing.assert_allclose(levy_exponent(reflect(t), Y), levy_exponent(t, -Y), atol=1e-10)

    def test_dilate_by_zero_is_degenerate(self):
        assert dilate(compound_poisson(), 0.0).is_degenerate()


class TestInvariants:
    """Φ(0) = 0, hermitian symmetry and Re Φ ≤ 0."""

    def test_fixture_laws_pass(self):
        for path in sorted(LAWS_DIR.glob("*.json")):
            report = check_exponent_invariants(load_triple(path).exponent())
            assert report.passed, path.name

    def test_positive_real_part_fails(self):
        bad = ExponentFn(func=lambda y: (y**2).astype(complex))
        assert not check_exponent_invariants(bad).passed

    @settings(max_examples=50, deadline=None)
    @given(atomic_triples())
    def test_random_atomic_triples(self, t: LevyTriple):
        assert check_exponent_invariants(t.exponent()).passed

    @settings(max_examples=30, deadline=None)
    @given(atomic_triples(), atomic_triples())
    def test_convolution_is_additive(self, first: LevyTriple, second: LevyTriple):
        np.testing.assert_allclose(
            levy_exponent(convolve(first, second), Y),
            levy_exponent(first, Y) + levy_exponent(second, Y),
            atol=1e-9,
        )


class TestSerialization:
    """JSON load and save of triples."""

    def test_save_and_load(self, tmp_path: Path):
        t = convolve(compound_poisson(), LevyTriple(gaussian_var=0.5, levy=stable_measure(1.5, 1.0)))
        path = save_triple(t, tmp_path / "law.json")
        assert load_triple(path) == t

    def test_density_with_infinite_end(self, tmp_path: Path):
        path = save_triple(pareto2(), tmp_path / "pareto.json")
        assert load_triple(path).levy.upper_tail(2.0) == pytest.approx(0.5, abs=1e-8)

    def test_infinite_ends_survive_json(self):
        text = pareto2().model_dump_json()
        assert '"hi":"Infinity"' in text
        assert parse_triple(json.loads(text)) == pareto2()
