"""Finite-level numerical certificates for the measure family.

Two kinds of evidence are produced here.  For mutual singularity of distinct
family members: the total-variation distance between level marginals (which
climbs to 2 under refinement iff the measures separate) and the Hellinger
affinity, which by the cylinder-product structure equals rho^n with

    rho(w, w') = (1 + sqrt(w w') + sqrt((1-w)(1-w'))) / 2 < 1  for w != w'.

The affinity is summed exhaustively over all 6^n words; the closed form is
kept separate so tests can pit one against the other.

For the regularity direction: Monte Carlo estimates of the doubling ratio
mu(B(x,2r))/mu(B(x,r)) and of the (1,1) averaged-oscillation ratio

    avg_B |u - u_B| dmu  /  ( r * avg_{lam B} g dmu )

over random piecewise-linear test functions u with upper gradient g, plus a
sampler for the measured family of monotone geodesics ("pencils") that weights
top branches by w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .addresses import PointAddress, format_fraction
from .graphs import (
    LevelGraph,
    center_edge_segments,
    covered_length_units,
    endpoint_cover,
    sweep_distances,
)
from .measures import MeasureSpec, as_spec, level_densities, level_masses

# ---------------------------------------------------------------------------
# singularity certificates


def tv_distance(level: int, m: MeasureSpec | float, m2: MeasureSpec | float) -> float:
    """Total variation between the level marginals, summed over all words."""
    a = level_masses(level, m)
    b = level_masses(level, m2)
    return float(np.abs(a - b).sum())


def affinity_factor(m: MeasureSpec | float, m2: MeasureSpec | float) -> float:
    """Per-level decay factor rho of the Hellinger affinity (closed form)."""
    w, w2 = as_spec(m).w, as_spec(m2).w
    return (1.0 + math.sqrt(w * w2) + math.sqrt((1.0 - w) * (1.0 - w2))) / 2.0


def hellinger_affinity(level: int, m: MeasureSpec | float, m2: MeasureSpec | float) -> float:
    """Sum of sqrt of mass products, exhaustively over all 6^level words."""
    a = level_masses(level, m)
    b = level_masses(level, m2)
    return float(np.sqrt(a * b).sum())


def tv_lower_bound(level: int, m: MeasureSpec | float, m2: MeasureSpec | float) -> float:
    """Standard bound tv >= 2(1 - affinity), with the closed-form affinity."""
    return 2.0 * (1.0 - affinity_factor(m, m2) ** level)


# ---------------------------------------------------------------------------
# piecewise-linear test functions


@dataclass
class LipschitzFunction:
    """Vertex values extended linearly along every edge of one level graph."""

    graph: LevelGraph
    vertex_values: np.ndarray

    def edge_gradients(self) -> np.ndarray:
        """Constant upper gradient per edge: |endpoint difference| / length."""
        u = self.vertex_values
        return np.abs(u[self.graph.edge_dst] - u[self.graph.edge_src]) * 4.0**self.graph.level

    @property
    def lipschitz_constant(self) -> float:
        return float(self.edge_gradients().max())

    def value_at(self, p: PointAddress) -> float:
        e = self.graph.edge_index(p.word)
        u0 = float(self.vertex_values[self.graph.edge_src[e]])
        u1 = float(self.vertex_values[self.graph.edge_dst[e]])
        return u0 + (u1 - u0) * float(p.offset / self.graph.edge_len)


def random_lipschitz(
    g: LevelGraph,
    seed,
    roughness: float = 0.25,
    scale: float = 1.0,
) -> LipschitzFunction:
    """Spatially correlated random test function, rough at every scale.

    Endpoint values are drawn at the root level; each refinement linearly
    interpolates the parent values onto the four inserted vertices and adds
    independent noise of amplitude scale * roughness^m.  With roughness 1/4
    the noise matches the shrinking edge length, so per-edge gradients stay
    of order one across levels; with roughness 0 the function is affine in
    the chart coordinate.
    """
    rng = np.random.default_rng(seed)
    chain = g.chain()
    u = np.empty(g.n_vertices)
    u[:2] = rng.standard_normal(2) * scale
    amp = float(scale)
    for coarse in chain[:-1]:
        amp *= roughness
        up = u[coarse.edge_src]
        uq = u[coarse.edge_dst]
        new = np.empty((coarse.n_edges, 4))
        new[:, 0] = 0.75 * up + 0.25 * uq
        mid = 0.5 * (up + uq)
        new[:, 1] = mid
        new[:, 2] = mid
        new[:, 3] = 0.25 * up + 0.75 * uq
        new += rng.standard_normal((coarse.n_edges, 4)) * amp
        u[coarse.n_vertices : coarse.n_vertices + 4 * coarse.n_edges] = new.ravel()
    return LipschitzFunction(graph=g, vertex_values=u)


# ---------------------------------------------------------------------------
# pencils of monotone geodesics

_TOP_STEP = np.array([0, 1, 2, 5], dtype=np.int64)  # digits 1,2,3,6
_BOTTOM_STEP = np.array([0, 3, 4, 5], dtype=np.int64)  # digits 1,4,5,6


@dataclass(frozen=True)
class PencilCurve:
    """A monotone left-to-right geodesic through one level graph."""

    level: int
    w: float
    seed: int
    edge_indices: np.ndarray  # 4^level edges in traversal order
    choices: tuple[np.ndarray, ...]  # per refinement round, True = top branch

    @property
    def length(self) -> Fraction:
        return Fraction(int(self.edge_indices.size), 4**self.level)

    def edge_words(self) -> list[str]:
        from .addresses import word_at

        return [word_at(self.level, int(i)) for i in self.edge_indices]


def pencil_sample(seed: int, m: MeasureSpec | float, level: int) -> PencilCurve:
    """Sample one pencil curve: top branch with probability w per diamond."""
    w = as_spec(m).w
    rng = np.random.default_rng(seed)
    path = np.zeros(1, dtype=np.int64)
    choices = []
    for _ in range(level):
        top = rng.random(path.size) < w
        choices.append(top)
        step = np.where(top[:, None], _TOP_STEP[None, :], _BOTTOM_STEP[None, :])
        path = (6 * path[:, None] + step).ravel()
    return PencilCurve(level=level, w=w, seed=seed, edge_indices=path, choices=tuple(choices))


# ---------------------------------------------------------------------------
# doubling ratios


def default_radii(level: int, cap: Fraction = Fraction(1, 4)) -> list[Fraction]:
    """Radius grid 4^-j * {1, 3/2, 2, 3} over the level's scales, up to cap."""
    grid = set()
    for j in range(1, max(level, 1) + 1):
        step = Fraction(1, 4**j)
        for c in (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)):
            r = c * step
            if 0 < r <= cap:
                grid.add(r)
    return sorted(grid)


@dataclass
class DoublingReport:
    level: int
    w: float
    samples: int
    seed: int
    max_ratio: float
    mean_ratio: float
    worst: dict
    radii: list[str]

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "w": self.w,
            "samples": self.samples,
            "seed": self.seed,
            "max_ratio": self.max_ratio,
            "mean_ratio": self.mean_ratio,
            "worst": self.worst,
            "radii": self.radii,
        }


def _random_center(g: LevelGraph, rng: np.random.Generator) -> PointAddress:
    # uniform over edges, then over a 64-point dyadic offset grid, so the
    # integer distance kernel stays exact
    e = int(rng.integers(g.n_edges))
    k = int(rng.integers(64))
    return PointAddress(g.edge_word(e), Fraction(k, 64) * g.edge_len)


def doubling_ratio(
    g: LevelGraph,
    m: MeasureSpec | float,
    center: PointAddress,
    r: Fraction,
    _densities: np.ndarray | None = None,
) -> tuple[float, float, float]:
    """(ratio, inner mass, outer mass) for the ball pair B(x,r), B(x,2r)."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("doubling needs a positive radius")
    densities = level_densities(g.level, m) if _densities is None else _densities
    dist, scale = sweep_distances(g, center, 2 * r, extra_denoms=(r.denominator,))
    inner_units = covered_length_units(g, center, dist, scale, r)
    outer_units = covered_length_units(g, center, dist, scale, 2 * r)
    inner = float(densities @ inner_units.astype(np.float64)) / scale
    outer = float(densities @ outer_units.astype(np.float64)) / scale
    if inner <= 0.0:
        raise RuntimeError("positive radius gives a positive-mass ball by construction")
    return outer / inner, inner, outer


def doubling_estimate(
    g: LevelGraph,
    m: MeasureSpec | float,
    samples: int = 1000,
    radii: list[Fraction] | None = None,
    seed: int = 0,
) -> DoublingReport:
    """Max doubling ratio over random (center, radius) pairs at one level."""
    spec = as_spec(m)
    radii = default_radii(g.level) if radii is None else [Fraction(r) for r in radii]
    if not radii:
        raise ValueError("empty radius grid")
    for r in radii:
        if not 0 < r <= g.diameter / 2:
            raise ValueError(f"radius {r} outside (0, diameter/2]")
    densities = level_densities(g.level, spec)
    rng = np.random.default_rng(seed)
    best_ratio = -math.inf
    worst: dict = {}
    total = 0.0
    for _ in range(samples):
        center = _random_center(g, rng)
        r = radii[int(rng.integers(len(radii)))]
        ratio, inner, outer = doubling_ratio(g, spec, center, r, _densities=densities)
        total += ratio
        if ratio > best_ratio:
            best_ratio = ratio
            worst = {
                "word": center.word,
                "offset": format_fraction(center.offset),
                "radius": format_fraction(r),
                "inner_mass": inner,
                "outer_mass": outer,
            }
    return DoublingReport(
        level=g.level,
        w=spec.w,
        samples=samples,
        seed=seed,
        max_ratio=best_ratio,
        mean_ratio=total / samples,
        worst=worst,
        radii=[format_fraction(r) for r in radii],
    )


# ---------------------------------------------------------------------------
# averaged-oscillation (Poincaré-type) ratios


def _segment_arrays(g, center, dist, scale, r):
    """Covered segments as flat float arrays (edge ids, lo, hi), absolute units."""
    cov_a, cov_b = endpoint_cover(g, dist, scale, r)
    elen = scale // 4**g.level
    e_c = g.edge_index(center.word)
    cov_a[e_c] = 0
    cov_b[e_c] = 0
    full = np.nonzero(cov_a + cov_b >= elen)[0]
    partial = cov_a + cov_b < elen
    ia = np.nonzero(partial & (cov_a > 0))[0]
    ib = np.nonzero(partial & (cov_b > 0))[0]
    c_segs = center_edge_segments(g, center, dist, scale, r)
    edges = np.concatenate(
        [full, ia, ib, np.full(len(c_segs), e_c, dtype=np.int64)]
    ).astype(np.int64)
    lo = np.concatenate(
        [
            np.zeros(full.size),
            np.zeros(ia.size),
            (elen - cov_b[ib]).astype(np.float64),
            np.array([s[0] for s in c_segs], dtype=np.float64),
        ]
    )
    hi = np.concatenate(
        [
            np.full(full.size, float(elen)),
            cov_a[ia].astype(np.float64),
            np.full(ib.size, float(elen)),
            np.array([s[1] for s in c_segs], dtype=np.float64),
        ]
    )
    inv = 1.0 / scale
    return edges, lo * inv, hi * inv


def _segment_values(g: LevelGraph, f: LipschitzFunction, segs):
    edges, lo, hi = segs
    u_src = f.vertex_values[g.edge_src[edges]]
    u_dst = f.vertex_values[g.edge_dst[edges]]
    slope = (u_dst - u_src) * 4.0**g.level
    return slope, u_src + slope * lo, u_src + slope * hi


def _mass_and_u_integral(g, f, densities, segs):
    edges, lo, hi = segs
    if edges.size == 0:
        return 0.0, 0.0
    dens = densities[edges]
    seg_len = hi - lo
    _, u_lo, u_hi = _segment_values(g, f, segs)
    mass = float((dens * seg_len).sum())
    int_u = 0.5 * float((dens * seg_len * (u_lo + u_hi)).sum())
    return mass, int_u


def _gradient_integral(g, f, densities, segs):
    edges, lo, hi = segs
    if edges.size == 0:
        return 0.0, 0.0
    dens = densities[edges]
    seg_len = hi - lo
    slope, _, _ = _segment_values(g, f, segs)
    mass = float((dens * seg_len).sum())
    int_g = float((dens * seg_len * np.abs(slope)).sum())
    return mass, int_g


def _abs_dev_integral(g, f, densities, segs, u_mean):
    # |u - u_mean| is piecewise linear with at most one sign change per
    # segment; the crossing case integrates to (v0^2 + v1^2) L / 2(|v0|+|v1|)
    edges, lo, hi = segs
    dens = densities[edges]
    seg_len = hi - lo
    _, u_lo, u_hi = _segment_values(g, f, segs)
    v0 = u_lo - u_mean
    v1 = u_hi - u_mean
    a0 = np.abs(v0)
    a1 = np.abs(v1)
    trapezoid = 0.5 * (a0 + a1) * seg_len
    denom = np.maximum(a0 + a1, 1e-300)
    crossing = (v0 * v0 + v1 * v1) * seg_len / (2.0 * denom)
    per_seg = np.where(v0 * v1 < 0.0, crossing, trapezoid)
    return float((dens * per_seg).sum())


def poincare_ratio(
    g: LevelGraph,
    f: LipschitzFunction,
    m: MeasureSpec | float,
    center: PointAddress,
    radius,
    lam=2,
    _densities: np.ndarray | None = None,
) -> float | None:
    """Oscillation ratio of `f` on one ball, or None when the trial degenerates.

    Numerator: measure-average of |u - u_B| over B(center, radius).
    Denominator: radius times the measure-average of the upper gradient over
    the dilated ball B(center, lam * radius).  None signals a zero-gradient
    denominator (u constant on the dilated ball).
    """
    r = Fraction(radius)
    if r <= 0:
        raise ValueError("radius must be positive")
    lam = Fraction(lam)
    if lam < 1:
        raise ValueError("dilation must be >= 1")
    densities = level_densities(g.level, m) if _densities is None else _densities
    dist, scale = sweep_distances(g, center, lam * r, extra_denoms=(r.denominator,))
    seg_inner = _segment_arrays(g, center, dist, scale, r)
    seg_outer = _segment_arrays(g, center, dist, scale, lam * r)
    mass_inner, int_u = _mass_and_u_integral(g, f, densities, seg_inner)
    if mass_inner <= 0.0:
        return None
    u_mean = int_u / mass_inner
    oscillation = _abs_dev_integral(g, f, densities, seg_inner, u_mean) / mass_inner
    mass_outer, int_g = _gradient_integral(g, f, densities, seg_outer)
    if mass_outer <= 0.0:
        return None
    denominator = float(r) * (int_g / mass_outer)
    if denominator == 0.0:
        return None
    return oscillation / denominator


@dataclass
class PoincareReport:
    level: int
    w: float
    lam: float
    trials: int
    seed: int
    roughness: float
    max_ratio: float
    mean_ratio: float
    skipped: int
    worst: dict
    radii: list[str]

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "w": self.w,
            "lam": self.lam,
            "trials": self.trials,
            "seed": self.seed,
            "roughness": self.roughness,
            "max_ratio": self.max_ratio,
            "mean_ratio": self.mean_ratio,
            "skipped": self.skipped,
            "worst": self.worst,
            "radii": self.radii,
        }


def poincare_estimate(
    g: LevelGraph,
    m: MeasureSpec | float,
    trials: int = 1000,
    lam=2,
    seed: int = 0,
    roughness: float = 0.25,
    radii: list[Fraction] | None = None,
) -> PoincareReport:
    """Max oscillation ratio over random test functions and random balls."""
    spec = as_spec(m)
    lam = Fraction(lam)
    radii = default_radii(g.level) if radii is None else [Fraction(r) for r in radii]
    densities = level_densities(g.level, spec)
    rng = np.random.default_rng(seed)
    best = -math.inf
    worst: dict = {}
    total = 0.0
    skipped = 0
    evaluated = 0
    for _ in range(trials):
        f = random_lipschitz(g, rng, roughness=roughness)
        center = _random_center(g, rng)
        r = radii[int(rng.integers(len(radii)))]
        ratio = poincare_ratio(g, f, spec, center, r, lam=lam, _densities=densities)
        if ratio is None:
            skipped += 1
            continue
        evaluated += 1
        total += ratio
        if ratio > best:
            best = ratio
            worst = {
                "word": center.word,
                "offset": format_fraction(center.offset),
                "radius": format_fraction(r),
            }
    return PoincareReport(
        level=g.level,
        w=spec.w,
        lam=float(lam),
        trials=trials,
        seed=seed,
        roughness=roughness,
        max_ratio=best,
        mean_ratio=total / max(evaluated, 1),
        skipped=skipped,
        worst=worst,
        radii=[format_fraction(r) for r in radii],
    )
