"""The one-parameter family of measures on the tower.

For a weight w in (0,1), the level-n measure has a constant density against
arclength on every edge.  Refining an edge multiplies the density by 1 on the
outer quarters (digits 1,6), by w on the top branch (2,3) and by 1-w on the
bottom branch (4,5); level 0 carries plain Lebesgue measure.  Since each child
edge has a quarter of the parent's length, the mass of a word's cylinder is
the product of per-digit probabilities (1/4, w/4, w/4, (1-w)/4, (1-w)/4, 1/4),
so every level marginal is a probability measure and parent mass equals the
sum of the six child masses, algebraically: 2 + 2w + 2(1-w) = 4.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Iterator, TYPE_CHECKING

import numpy as np

from .addresses import child_edges, validate_word, word_at

if TYPE_CHECKING:
    from .graphs import BallCover

W_EPS = 1e-9


@dataclass(frozen=True)
class MeasureSpec:
    """Identifies one measure of the family by its top-branch weight w."""

    w: float

    def __post_init__(self):
        w = float(self.w)
        object.__setattr__(self, "w", w)
        if not W_EPS < w < 1.0 - W_EPS:
            raise ValueError(f"weight w must lie in ({W_EPS}, {1 - W_EPS}), got {w}")


def as_spec(m: "MeasureSpec | float") -> MeasureSpec:
    return m if isinstance(m, MeasureSpec) else MeasureSpec(m)


@dataclass(frozen=True)
class EdgeMeasureRecord:
    word: str
    density: float
    mass: float


def branch_counts(word: str) -> tuple[int, int]:
    """(top, bottom) digit counts: exponents of w and 1-w in the density."""
    validate_word(word)
    top = word.count("2") + word.count("3")
    bottom = word.count("4") + word.count("5")
    return top, bottom


def density_factors(m: MeasureSpec | float) -> np.ndarray:
    """Per-digit density multipliers, indexed by digit-1."""
    w = as_spec(m).w
    return np.array([1.0, w, w, 1.0 - w, 1.0 - w, 1.0])


def mass_factors(m: MeasureSpec | float) -> np.ndarray:
    """Per-digit cylinder probabilities (density factors times 1/4)."""
    return density_factors(m) / 4.0


def edge_density(word: str, m: MeasureSpec | float) -> float:
    """Density of the level measure against arclength on edge `word`."""
    w = as_spec(m).w
    top, bottom = branch_counts(word)
    return w**top * (1.0 - w) ** bottom


def edge_mass(word: str, m: MeasureSpec | float) -> float:
    """Total measure of edge `word`: density times 4^-level."""
    return edge_density(word, m) * 4.0 ** (-len(word))


def pushforward_consistency(
    word: str, m: MeasureSpec | float, tol: float = 1e-12
) -> tuple[bool, float]:
    """Check parent mass == sum of the six child masses; return residual."""
    spec = as_spec(m)
    children = sum(edge_mass(child, spec) for child in child_edges(word))
    residual = abs(edge_mass(word, spec) - children)
    return residual <= tol, residual


def rn_ratio(word: str, m: MeasureSpec | float, m2: MeasureSpec | float) -> float:
    """Density ratio between two family members on one edge.

    Equals (w/w')^top * ((1-w)/(1-w'))^bottom; evaluated in log space so
    words thousands of digits deep neither overflow nor underflow.
    """
    w, w2 = as_spec(m).w, as_spec(m2).w
    top, bottom = branch_counts(word)
    return math.exp(top * math.log(w / w2) + bottom * math.log((1.0 - w) / (1.0 - w2)))


def level_densities(level: int, m: MeasureSpec | float) -> np.ndarray:
    """Densities of all 6^level edges, in lexicographic word order."""
    out = np.ones(1)
    factors = density_factors(m)
    for _ in range(level):
        out = np.multiply.outer(out, factors).ravel()
    return out


def level_masses(level: int, m: MeasureSpec | float) -> np.ndarray:
    """Masses of all 6^level edges, in lexicographic word order."""
    out = np.ones(1)
    factors = mass_factors(m)
    for _ in range(level):
        out = np.multiply.outer(out, factors).ravel()
    return out


def ball_mass(cover: "BallCover", m: MeasureSpec | float) -> float:
    """Measure of a metric ball, integrated over its covered segments."""
    spec = as_spec(m)
    total = 0.0
    for word, lo, hi in cover.segments:
        total += edge_density(word, spec) * float(hi - lo)
    return total


def level_records(level: int, m: MeasureSpec | float) -> Iterator[EdgeMeasureRecord]:
    """Per-edge (word, density, mass) rows for one level."""
    densities = level_densities(level, m)
    scale = 4.0 ** (-level)
    for i, d in enumerate(densities):
        yield EdgeMeasureRecord(word_at(level, i), float(d), float(d) * scale)


def write_measure_csv(fileobj: IO[str], level: int, m: MeasureSpec | float) -> None:
    writer = csv.writer(fileobj)
    writer.writerow(["word", "density", "mass"])
    for rec in level_records(level, m):
        writer.writerow([rec.word, repr(rec.density), repr(rec.mass)])
