"""Infinitely divisible laws as Lévy-Khintchine triples."""

from levicalc.measures.exponent import ExponentFn, InvariantReport, check_exponent_invariants
from levicalc.measures.levy import (
    Atom,
    AtomicMeasure,
    DensityMeasure,
    DensityPiece,
    GammaFamily,
    Growth,
    ImageMeasure,
    LevyMeasure,
    MixtureMeasure,
    ParametricMeasure,
    StableFamily,
    atomic,
    gamma_measure,
    merge_measures,
    stable_coef,
    stable_measure,
    stable_sigma,
)
from levicalc.measures.triple import (
    LevyTriple,
    MomentReport,
    convolution_power,
    convolve,
    dilate,
    levy_exponent,
    load_triple,
    log_moment,
    log_moment_finite,
    parse_triple,
    reflect,
    save_triple,
    tail_moment,
)

__all__ = [
    "Atom",
    "AtomicMeasure",
    "DensityMeasure",
    "DensityPiece",
    "ExponentFn",
    "GammaFamily",
    "Growth",
    "ImageMeasure",
    "InvariantReport",
    "LevyMeasure",
    "LevyTriple",
    "MixtureMeasure",
    "MomentReport",
    "ParametricMeasure",
    "StableFamily",
    "atomic",
    "check_exponent_invariants",
    "convolution_power",
    "convolve",
    "dilate",
    "gamma_measure",
    "levy_exponent",
    "load_triple",
    "log_moment",
    "log_moment_finite",
    "merge_measures",
    "parse_triple",
    "reflect",
    "save_triple",
    "stable_coef",
    "stable_measure",
    "stable_sigma",
    "tail_moment",
]
