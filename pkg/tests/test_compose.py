"""Tests for composition, the closed-form catalog and equivalence checks."""

import math

import numpy as np
import pytest
from scipy import special

from levicalc.compose import (
    EQUIVALENT_PAIRS,
    catalog,
    commutativity_check,
    compose,
    equivalence_check,
    get_entry,
    get_pair,
    identify,
    image_density_mc,
    image_tail,
    list_entries,
    pushforward,
)
from levicalc.compose.catalog import (
    canonical_map,
    constituents,
    entry_tail,
    export_catalog,
    load_registry,
)
from levicalc.compose.pushforward import default_w_grid, image_tail_table
from levicalc.errors import InputError, PreconditionError, UnsupportedError
from levicalc.experiments.fixtures import get_law, get_map
from levicalc.kernels import IntegralMap, classify
from levicalc.kernels.clocks import lebesgue
from levicalc.kernels.transforms import const, neg_log, opaque

Y = np.array([-2.0, -0.5, 0.5, 2.0])


class TestCatalog:
    """Registry contents and parameter handling."""

    def test_entries(self):
        assert list_entries() == [
            "thorin",
            "class_lm",
            "two_power",
            "power_exp",
            "gamma_clock",
            "euler_gamma0",
        ]
        assert [e.name for e in catalog() if e.is_evaluator] == ["euler_gamma0"]

    def test_unknown_entry(self):
        with pytest.raises(KeyError, match="Unknown catalog entry"):
            get_entry("nope")

    def test_parameter_checks(self):
        with pytest.raises(InputError, match="positive integer"):
            constituents(get_entry("class_lm"), {"m": 1.5})
        with pytest.raises(InputError, match="no parameter"):
            constituents(get_entry("thorin"), {"beta": 1.0})
        with pytest.raises(InputError, match="positive"):
            canonical_map(get_entry("two_power"), {"beta": -1.0})

    def test_tails(self):
        assert entry_tail(get_entry("thorin"), 1.0) == pytest.approx(special.exp1(1.0))
        assert entry_tail(get_entry("class_lm"), math.exp(-1.0), {"m": 2.0}) == pytest.approx(0.5)
        assert entry_tail(get_entry("two_power"), 0.25) == pytest.approx(0.5625)
        assert entry_tail(get_entry("thorin"), 0.0) == math.inf
        assert entry_tail(get_entry("two_power"), 0.0) == 1.0

    def test_canonical_tail_agrees(self):
        """The canonical map's clock measure carries the catalog tail."""
        for name, params in [("thorin", None), ("class_lm", {"m": 3.0}), ("two_power", {"beta": 2.0})]:
            entry = get_entry(name)
            m = canonical_map(entry, params)
            for w in (0.1, 0.5):
                mass = m.level_mass(w) + m.level_mass(w, upper=False)
                assert mass == pytest.approx(entry_tail(entry, w, params), rel=1e-9), name

    def test_export_matches_shipped_registry(self):
        exported, shipped = export_catalog(), load_registry()
        assert exported["version"] == shipped["version"]
        assert [e["name"] for e in exported["entries"]] == [e["name"] for e in shipped["entries"]]
        assert [e["finite"] for e in exported["entries"]] == [e["finite"] for e in shipped["entries"]]


class TestPushforward:
    """Images of compositions, matched or tabulated."""

    def test_thorin_either_order(self):
        for maps in ([get_map("class_l"), get_map("upsilon")], [get_map("upsilon"), get_map("class_l")]):
            result = pushforward(maps)
            assert result.closed_form == "thorin"
            assert not result.finite
            assert result.tail(1.0) == pytest.approx(special.exp1(1.0))

    def test_identity_is_dropped(self):
        result = pushforward([get_map("identity"), get_map("class_l"), get_map("upsilon")])
        assert result.closed_form == "thorin"
        entry, params = identify([get_map("class_l"), get_map("identity"), get_map("class_l")])
        assert entry.name == "class_lm"
        assert params == {"m": 2.0}

    def test_only_identities(self):
        result = pushforward([get_map("identity")])
        assert classify(result.image) == "identity"

    def test_zero_map(self):
        zero = IntegralMap(h=const(0.0), r=lebesgue(), b=1.0, allow_zero=True)
        result = pushforward([get_map("class_l"), zero])
        assert classify(result.image) == "zero"

    def test_empty_rejected(self):
        with pytest.raises(PreconditionError):
            pushforward([])

    def test_single_map_tabulated(self):
        result = pushforward([get_map("unit_linear")])
        assert result.closed_form is None
        assert result.finite
        assert result.tail(0.5) == pytest.approx(0.5, abs=1e-12)
        assert result.tail(0.25) == pytest.approx(0.75, abs=1e-12)
        assert result.image_measure.tail(0.5) == pytest.approx(0.5, abs=1e-4)

    def test_product_of_uniforms(self):
        """P(UV > w) = 1 - w + w log w."""
        maps = [get_map("unit_linear"), get_map("unit_linear")]
        expected = 1.0 - 0.5 + 0.5 * math.log(0.5)
        assert image_tail(maps, 0.5) == pytest.approx(expected, rel=1e-8)
        assert pushforward(maps).tail(0.5) == pytest.approx(expected, abs=1e-3)

    def test_sign_changing_integrand_rejected(self):
        with pytest.raises(UnsupportedError, match="vanishes"):
            pushforward([IntegralMap(h=neg_log(), r=lebesgue(), b=2.0), get_map("class_l")])

    def test_opaque_rejected(self):
        with pytest.raises(UnsupportedError, match="opaque"):
            pushforward([IntegralMap(h=opaque(np.cos), r=lebesgue(), b=1.0)])

    def test_compose_returns_canonical_map(self):
        m = compose([get_map("class_l"), get_map("upsilon")])
        assert m == canonical_map(get_entry("thorin"))

    def test_tail_table(self):
        result = pushforward([get_map("class_l"), get_map("upsilon")])
        grid = default_w_grid(result)
        rows = image_tail_table(result, grid)
        tails = [tail for _, tail in rows]
        assert len(rows) == 41
        assert all(a >= b for a, b in zip(tails[:-1], tails[1:], strict=True))


class TestImageSampling:
    """Monte Carlo samples of the image measure."""

    def test_deterministic_with_seed(self):
        maps = constituents(get_entry("two_power"))
        first = image_density_mc(maps, 2000, seed=11)
        second = image_density_mc(maps, 2000, seed=11)
        np.testing.assert_array_equal(first.samples, second.samples)
        assert first.seed == 11

    def test_matches_closed_form(self):
        result = image_density_mc(constituents(get_entry("two_power")), 4000, seed=5)
        assert result.closed_form == "two_power"
        assert result.ks_pvalue > 1e-3

    def test_infinite_clock_needs_window(self):
        with pytest.raises(PreconditionError, match="infinite mass"):
            image_density_mc([get_map("class_l"), get_map("upsilon")], 100, seed=1)

    @pytest.mark.slow
    def test_windowed_infinite_image(self):
        maps = [get_map("class_l"), get_map("unit_linear")]
        result = image_density_mc(maps, 2000, seed=3, window=0.01)
        assert np.all(np.abs(result.samples) > 0.01)
        assert result.ks_pvalue > 1e-3


class TestEquivalence:
    """Exponent-level equivalence and commutativity."""

    @pytest.mark.parametrize("name", list(EQUIVALENT_PAIRS))
    def test_registered_pairs(self, name: str):
        pair = get_pair(name)
        m1, m2 = pair.build()
        report = equivalence_check(m1, m2, [get_law("compound_poisson"), get_law("gaussian")], Y)
        assert report.verdict == pair.verdict
        assert report.equivalent

    def test_not_equivalent(self):
        report = equivalence_check(get_map("unit_linear"), get_map("class_l"), [get_law("gaussian")], Y)
        assert report.verdict == "not_equivalent"
        assert report.pointwise == pytest.approx(1.0 / 12.0 * 4.0)

    def test_unknown_pair(self):
        with pytest.raises(KeyError):
            get_pair("nope")

    @pytest.mark.slow
    def test_upsilon_and_class_l_commute(self):
        report = commutativity_check(
            get_map("upsilon"),
            get_map("class_l"),
            [get_law("compound_poisson")],
            Y,
            against_composition=True,
        )
        assert report.commute
        assert report.single_map is not None
        assert report.single_map < 1e-6
