"""Samplers for increments of a Lévy process over arbitrary time steps.

A law [z, R, M] is split into

* drift z (plus the compensator of the simulated jumps in ε < |x| ≤ 1),
* Gaussian part R (plus, optionally, the variance of the dropped jumps),
* compound Poisson jumps from the atoms with |x| > ε, density pieces
  discretized to atoms on log-spaced cells,
* exact samplers for the parametric families (Chambers-Mallows-Stuck for
  symmetric stable, gamma variates for the gamma tilt).
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from levicalc.config import DEFAULT_TOLERANCE, Tolerance
from levicalc.errors import PreconditionError, SmallJumpWarning, UnsupportedError
from levicalc.measures.levy import (
    AtomicMeasure,
    DensityMeasure,
    DensityPiece,
    GammaFamily,
    LevyMeasure,
    MixtureMeasure,
    ParametricMeasure,
    StableFamily,
    atomic,
    merge_measures,
)
from levicalc.measures.triple import LevyTriple

logger = logging.getLogger(__name__)

CELLS_PER_DECADE = 48
DENSITY_TAIL_TOL = 1e-8


def symmetric_stable(rng: np.random.Generator, index: float, size: tuple[int, ...]) -> np.ndarray:
    """Standard symmetric p-stable variates, exponent -|y|^p (Chambers-Mallows-Stuck)."""
    phi = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size)
    if index == 1:
        return np.tan(phi)
    w = rng.standard_exponential(size)
    return (
        np.sin(index * phi)
        / np.cos(phi) ** (1.0 / index)
        * (np.cos((1.0 - index) * phi) / w) ** ((1.0 - index) / index)
    )


def _upper_cutoff(piece: DensityPiece, tol: Tolerance) -> float:
    if math.isfinite(piece.hi):
        return piece.hi
    ones = lambda r: np.ones_like(r)  # noqa: E731
    cut = max(1.0, 2.0 * piece.lo)
    while piece.integral(ones, cut, math.inf, tol) > DENSITY_TAIL_TOL and cut < 1e300:
        cut *= 2.0
    return cut


def discretize_piece(
    piece: DensityPiece,
    epsilon: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
    cells_per_decade: int = CELLS_PER_DECADE,
) -> tuple[AtomicMeasure, float]:
    """Atoms for the part of a density piece with |x| > ε.

    Each log-spaced cell becomes one atom at the cell's mean jump with the
    cell's mass. Mass beyond the upper cutoff is below ``DENSITY_TAIL_TOL``.

    Returns:
        The atoms and ∫_{|x|≤ε} x² M(dx) of the dropped part.
    """
    small = piece.integral(np.square, 0.0, epsilon, tol) if piece.lo < epsilon else 0.0
    lo = max(piece.lo, epsilon)
    hi = _upper_cutoff(piece, tol)
    if not hi > lo:
        return AtomicMeasure(), small
    decades = max(math.log10(hi / lo), 1e-12)
    edges = np.geomspace(lo, hi, max(2, math.ceil(decades * cells_per_decade)) + 1)
    pairs = []
    for left, right in zip(edges[:-1], edges[1:], strict=True):
        mass = piece.integral(lambda r: np.ones_like(r), left, right, tol)
        if mass <= 0 or not math.isfinite(mass):
            continue
        first = piece.integral(lambda r: r, left, right, tol)
        pairs.append((piece.side * first / mass, mass))
    return atomic(*pairs), small


@dataclass(frozen=True)
class JumpTable:
    """Compound Poisson jumps: sizes x_k with intensities m_k."""

    sizes: np.ndarray
    rates: np.ndarray

    @property
    def total_rate(self) -> float:
        return float(np.sum(self.rates))

    def sample(self, rng: np.random.Generator, dt: np.ndarray, n: int) -> np.ndarray:
        """Sums of jumps over steps ``dt`` for ``n`` independent rows."""
        out = np.zeros((n, dt.size))
        if self.sizes.size == 0:
            return out
        counts = rng.poisson(self.total_rate * dt, size=(n, dt.size))
        total = int(counts.sum())
        if total == 0:
            return out
        cumulative = np.cumsum(self.rates) / self.total_rate
        picks = np.searchsorted(cumulative, rng.random(total), side="right")
        picks = np.minimum(picks, self.sizes.size - 1)
        owner = np.repeat(np.arange(counts.size), counts.ravel())
        out += np.bincount(owner, weights=self.sizes[picks], minlength=counts.size).reshape(counts.shape)
        return out


@dataclass(frozen=True)
class IncrementSampler:
    """Increment sampler for one law at a fixed jump truncation ε."""

    drift: float
    variance: float
    jumps: JumpTable
    stable: tuple[tuple[float, float], ...] = ()
    gamma: tuple[tuple[float, float, int], ...] = ()
    simulated: LevyTriple = field(default_factory=LevyTriple)

    def sample(self, rng: np.random.Generator, dt: np.ndarray | float, n: int) -> np.ndarray:
        """Increments over each step of ``dt`` for ``n`` rows, shape (n, len(dt))."""
        dt = np.atleast_1d(np.abs(np.asarray(dt, dtype=float)))
        out = np.broadcast_to(self.drift * dt, (n, dt.size)).copy()
        if self.variance:
            out += np.sqrt(self.variance * dt) * rng.standard_normal((n, dt.size))
        out += self.jumps.sample(rng, dt, n)
        for index, sigma in self.stable:
            scale = (sigma * dt) ** (1.0 / index)
            out += scale * symmetric_stable(rng, index, (n, dt.size))
        for coef, rate, side in self.gamma:
            compensator = coef * (-math.expm1(-rate)) / rate
            out += side * (rng.gamma(coef * dt, 1.0 / rate, size=(n, dt.size)) - compensator * dt)
        return out


def _collect(
    levy: LevyMeasure, epsilon: float, tol: Tolerance
) -> tuple[list[AtomicMeasure], list[ParametricMeasure], float]:
    if isinstance(levy, AtomicMeasure):
        return [levy], [], 0.0
    if isinstance(levy, ParametricMeasure):
        return [], [levy], 0.0
    if isinstance(levy, DensityMeasure):
        atoms, small = [], 0.0
        for piece in levy.pieces:
            cells, rest = discretize_piece(piece, epsilon, tol)
            atoms.append(cells)
            small += rest
        return atoms, [], small
    if isinstance(levy, MixtureMeasure):
        atoms, families, small = [], [], 0.0
        for part in levy.parts:
            a, f, s = _collect(part, epsilon, tol)
            atoms += a
            families += f
            small += s
        return atoms, families, small
    raise UnsupportedError(f"cannot sample increments for a {levy.kind} Lévy measure")


def _explicit_atoms(levy: LevyMeasure) -> list:
    if isinstance(levy, AtomicMeasure):
        return list(levy.atoms)
    if isinstance(levy, MixtureMeasure):
        return [a for part in levy.parts for a in _explicit_atoms(part)]
    return []


def build_sampler(
    t: LevyTriple,
    epsilon: float = 1e-3,
    *,
    compensate_small_jumps: bool = True,
    gaussian_substitute: bool = False,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> IncrementSampler:
    """Split a triple into drift, Gaussian, jump and parametric parts.

    Raises:
        PreconditionError: If ε is not positive.
        UnsupportedError: For image Lévy measures.
    """
    if not epsilon > 0:
        raise PreconditionError(f"jump truncation must be positive, got {epsilon}")
    pieces, families, small = _collect(t.levy, epsilon, tol)
    merged = merge_measures(*pieces) if pieces else AtomicMeasure()
    atoms = merged.atoms if isinstance(merged, AtomicMeasure) else ()

    explicit = _explicit_atoms(t.levy)
    if explicit:
        smallest = min(abs(a.x) for a in explicit)
        if epsilon >= smallest:
            warnings.warn(
                f"ε = {epsilon:g} drops atoms down to |x| = {smallest:g}",
                SmallJumpWarning,
                stacklevel=2,
            )

    kept = [a for a in atoms if abs(a.x) > epsilon]
    dropped = [a for a in atoms if abs(a.x) <= epsilon]
    small += sum(a.x * a.x * a.mass for a in dropped)
    inside = sum(a.x * a.mass for a in kept if abs(a.x) <= 1.0)

    drift = t.shift - inside if compensate_small_jumps else t.shift
    variance = t.gaussian_var + (small if gaussian_substitute else 0.0)
    jumps = JumpTable(
        sizes=np.array([a.x for a in kept], dtype=float),
        rates=np.array([a.mass for a in kept], dtype=float),
    )
    stable = tuple(
        (f.family.index, f.family.sigma) for f in families if isinstance(f.family, StableFamily)
    )
    gamma = tuple(
        (f.family.coef, f.family.rate, f.family.side)
        for f in families
        if isinstance(f.family, GammaFamily)
    )
    simulated = LevyTriple(
        shift=t.shift if compensate_small_jumps else t.shift + inside,
        gaussian_var=variance,
        levy=merge_measures(AtomicMeasure(atoms=tuple(kept)), *families),
    )
    logger.debug(
        "sampler: %d jump sizes (rate %.3g), %d stable, %d gamma, dropped x² mass %.3g",
        len(kept),
        jumps.total_rate,
        len(stable),
        len(gamma),
        small,
    )
    return IncrementSampler(
        drift=drift,
        variance=variance,
        jumps=jumps,
        stable=stable,
        gamma=gamma,
        simulated=simulated,
    )


def sample_levy_increments(
    t: LevyTriple,
    dt: float,
    n: int,
    rng: np.random.Generator,
    *,
    epsilon: float = 1e-3,
    compensate_small_jumps: bool = True,
    gaussian_substitute: bool = False,
) -> np.ndarray:
    """``n`` i.i.d. samples of the increment law ν^{*dt}."""
    sampler = build_sampler(
        t,
        epsilon,
        compensate_small_jumps=compensate_small_jumps,
        gaussian_substitute=gaussian_substitute,
    )
    return sampler.sample(rng, np.array([dt]), n)[:, 0]
