"""Digit-sequence sampling and the log likelihood-ratio rate.

A point of the limit space is coded (off a null set) by an i.i.d. sequence of
digits from {1..6} with probabilities (1/4, w/4, w/4, (1-w)/4, (1-w)/4, 1/4).
Along a path sampled with weight w', the per-digit log ratio of the w- and
w'-densities averages to

    rate(w, w') = (w'/2) ln(w/w') + ((1-w')/2) ln((1-w)/(1-w')),

which is strictly negative whenever w != w' (strict concavity of ln), the
mechanism behind the mutual singularity of distinct family members.  This
module samples paths reproducibly, reports digit frequencies against their
almost-sure limits, and certifies the negativity of the rate on grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .measures import MeasureSpec, as_spec

TOP_DIGITS = (2, 3)
BOTTOM_DIGITS = (4, 5)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of the six digits for one weight w."""

    w: float
    probabilities: np.ndarray

    @classmethod
    def for_spec(cls, m: MeasureSpec | float) -> "OutcomeDistribution":
        w = as_spec(m).w
        p = np.array([1.0, w, w, 1.0 - w, 1.0 - w, 1.0]) / 4.0
        return cls(w=w, probabilities=p)

    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.probabilities)
        c[-1] = 1.0  # guard against rounding in the last bin
        return c


def outcome_distribution(m: MeasureSpec | float) -> OutcomeDistribution:
    return OutcomeDistribution.for_spec(m)


def slln_limits(m: MeasureSpec | float) -> np.ndarray:
    """Almost-sure limits of the per-digit frequencies."""
    return outcome_distribution(m).probabilities


@dataclass(frozen=True)
class SamplePath:
    """A sampled digit prefix with its per-digit counters."""

    digits: np.ndarray  # uint8 values in 1..6
    counters: np.ndarray  # int64, counters[i-1] = occurrences of digit i
    w: float
    seed: int
    stream: int | None = None

    @property
    def n(self) -> int:
        return int(self.digits.size)

    def __post_init__(self):
        if int(self.counters.sum()) != self.n:
            raise ValueError("digit counters do not sum to the path length")


def _rng(seed: int, stream: int | None) -> np.random.Generator:
    # (seed, stream) seeds an independent substream for parallel workers
    return np.random.default_rng(seed if stream is None else [seed, stream])


def sample_path(
    seed: int, m: MeasureSpec | float, n: int, stream: int | None = None
) -> SamplePath:
    """Draw n i.i.d. digits by inverse CDF on a seeded generator.

    Identical (seed, stream, w, n) always reproduce the same path.
    """
    if n < 0:
        raise ValueError("path length must be nonnegative")
    spec = as_spec(m)
    cdf = outcome_distribution(spec).cdf()
    u = _rng(seed, stream).random(n)
    digits = (np.searchsorted(cdf, u, side="right") + 1).astype(np.uint8)
    counters = np.bincount(digits, minlength=7)[1:7].astype(np.int64)
    return SamplePath(digits=digits, counters=counters, w=spec.w, seed=seed, stream=stream)


def slln_report(path: SamplePath) -> list[dict]:
    """Empirical digit frequencies against their almost-sure limits."""
    if path.n < 1:
        raise ValueError("need at least one digit")
    limits = slln_limits(path.w)
    rows = []
    for i in range(6):
        freq = path.counters[i] / path.n
        rows.append(
            {
                "digit": i + 1,
                "count": int(path.counters[i]),
                "frequency": float(freq),
                "limit": float(limits[i]),
                "deviation": float(freq - limits[i]),
            }
        )
    return rows


def _log_factors(m: MeasureSpec | float, m2: MeasureSpec | float) -> tuple[float, float]:
    w, w2 = as_spec(m).w, as_spec(m2).w
    return math.log(w / w2), math.log((1.0 - w) / (1.0 - w2))


def empirical_rate(
    path: SamplePath, m: MeasureSpec | float, m2: MeasureSpec | float
) -> float:
    """(1/n) log of the density-ratio cylinder product along `path`."""
    if path.n < 1:
        raise ValueError("need at least one digit")
    lt, lb = _log_factors(m, m2)
    s_top = int(path.counters[1] + path.counters[2])
    s_bottom = int(path.counters[3] + path.counters[4])
    return (s_top * lt + s_bottom * lb) / path.n


def rate_trace(
    path: SamplePath,
    m: MeasureSpec | float,
    m2: MeasureSpec | float,
    every: int = 1000,
) -> list[dict]:
    """Running empirical rate at prefix lengths every, 2*every, ..., n."""
    if every < 1:
        raise ValueError("trace stride must be positive")
    if path.n < 1:
        raise ValueError("need at least one digit")
    lt, lb = _log_factors(m, m2)
    top = np.isin(path.digits, TOP_DIGITS).cumsum()
    bottom = np.isin(path.digits, BOTTOM_DIGITS).cumsum()
    theo = theoretical_rate(m, m2)
    marks = list(range(every, path.n + 1, every))
    if not marks or marks[-1] != path.n:
        marks.append(path.n)
    return [
        {
            "n": k,
            "empirical_rate": float((top[k - 1] * lt + bottom[k - 1] * lb) / k),
            "theoretical_rate": theo,
        }
        for k in marks
    ]


def theoretical_rate(m: MeasureSpec | float, m2: MeasureSpec | float) -> float:
    """Limit of the normalized log density ratio along paths sampled at w'."""
    w, w2 = as_spec(m).w, as_spec(m2).w
    lt, lb = _log_factors(m, m2)
    return 0.5 * (w2 * lt + (1.0 - w2) * lb)


@dataclass
class NegativityReport:
    """Outcome of a rate-negativity sweep over weight pairs."""

    n_pairs: int
    all_negative: bool
    max_rate: float
    worst_pair: tuple[float, float]
    failures: list[tuple[float, float, float]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n_pairs": self.n_pairs,
            "all_negative": self.all_negative,
            "max_rate": self.max_rate,
            "worst_pair": list(self.worst_pair),
            "failures": [list(f) for f in self.failures],
        }


def negativity_certificate(
    pairs: list[tuple[float, float]],
) -> NegativityReport:
    """Assert theoretical_rate < 0 on every pair; report the max (worst) rate."""
    if not pairs:
        raise ValueError("empty pair grid")
    max_rate = -math.inf
    worst = pairs[0]
    failures = []
    for w, w2 in pairs:
        if w == w2:
            raise ValueError(f"pair ({w}, {w2}) has equal weights; rate is 0 by definition")
        r = theoretical_rate(w, w2)
        if r > max_rate:
            max_rate, worst = r, (w, w2)
        if r >= 0.0:
            failures.append((w, w2, r))
    return NegativityReport(
        n_pairs=len(pairs),
        all_negative=not failures,
        max_rate=max_rate,
        worst_pair=worst,
        failures=failures,
    )


def weight_grid(n: int, lo: float = 0.02, hi: float = 0.98) -> list[tuple[float, float]]:
    """All off-diagonal pairs from an n x n equispaced grid in [lo, hi]^2."""
    ws = np.linspace(lo, hi, n)
    return [(float(a), float(b)) for a in ws for b in ws if a != b]
