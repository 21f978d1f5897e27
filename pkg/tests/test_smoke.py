"""Smoke tests for the public surface of levicalc."""

import importlib

import numpy as np
import pytest

from levicalc.kernels import identity_map
from levicalc.measures import LevyTriple, atomic, levy_exponent, parse_triple
from levicalc.transform import transform_triple

SUBPACKAGES = [
    "analysis",
    "compose",
    "kernels",
    "measures",
    "montecarlo",
    "numerics",
    "reporting",
    "transform",
]


@pytest.mark.parametrize("name", SUBPACKAGES)
def test_exports_resolve(name: str):
    """Every name a subpackage exports is importable from it."""
    module = importlib.import_module(f"levicalc.{name}")
    missing = [attr for attr in module.__all__ if not hasattr(module, attr)]
    assert not missing


def test_identity_map_keeps_law():
    law = LevyTriple(shift=0.3, gaussian_var=0.5, levy=atomic((1.0, 2.0), (-0.5, 1.0)))
    assert transform_triple(identity_map(), law) is law


def test_gaussian_exponent_from_plain_dict():
    law = parse_triple({"shift": 1.0, "gaussian_var": 2.0})
    y = np.array([-1.0, 0.5, 3.0])
    np.testing.assert_allclose(levy_exponent(law, y), 1j * y - y**2, atol=1e-12)
