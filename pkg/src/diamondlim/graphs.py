"""Explicit level graphs of the tower: construction, geodesics, metric balls.

Level n has 6^n edges of length 4^-n and 2 + 4(6^n - 1)/5 vertices.  Vertex
ids persist across levels; refining inserts, per parent edge e, the four
vertices V_n + 4e + (0..3): the quarter point, the top and bottom middle
points, and the three-quarter point.  Edge i of level n carries the word
word_at(n, i), so words never need storing.

All metric computations run on integers: distances are measured in units of
1/S for a per-query scale S that clears the denominators of the offsets and
radii involved, which makes every distance and ball boundary exact.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import IO

import numpy as np

from . import kernels
from .addresses import PointAddress, edge_length, format_fraction, index_of, word_at

HARD_MAX_LEVEL = 10
DEFAULT_MAX_LEVEL = 8
_SCALE_BITS_LIMIT = 61  # int64 kernel headroom


class BudgetError(RuntimeError):
    """Requested construction exceeds the configured level budget."""


def max_level() -> int:
    """Level budget: DIAMONDLIM_MAX_LEVEL (default 8), hard-capped at 10."""
    value = int(os.environ.get("DIAMONDLIM_MAX_LEVEL", DEFAULT_MAX_LEVEL))
    return min(value, HARD_MAX_LEVEL)


class LevelGraph:
    """One level of the tower as an immutable metric graph.

    Construction mutates nothing after __init__; distance and ball queries
    are pure, so instances are safe to share across threads.
    """

    def __init__(self, level, n_vertices, edge_src, edge_dst, coarser=None):
        self.level = level
        self.n_vertices = int(n_vertices)
        self.edge_src = edge_src
        self.edge_dst = edge_dst
        self.coarser = coarser
        self._csr = None
        self._canonical = None

    @property
    def n_edges(self) -> int:
        return int(self.edge_src.size)

    @property
    def edge_len(self) -> Fraction:
        return edge_length(self.level)

    # realized by the two degree-1 endpoint vertices; any point reaches
    # either endpoint along a chart-monotone path, so no pair exceeds 1
    diameter = Fraction(1)

    def edge_word(self, index: int) -> str:
        return word_at(self.level, index)

    def edge_index(self, word: str) -> int:
        if len(word) != self.level:
            raise ValueError(f"word {word!r} is not a level-{self.level} edge")
        return index_of(word)

    def chain(self) -> list["LevelGraph"]:
        """Graphs from level 0 up to this one (only if built incrementally)."""
        out: list[LevelGraph] = []
        g: LevelGraph | None = self
        while g is not None:
            out.append(g)
            g = g.coarser
        if len(out) != self.level + 1:
            raise ValueError("graph was built without its coarser chain")
        return out[::-1]

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        if self._csr is None:
            ends = np.concatenate([self.edge_src, self.edge_dst])
            other = np.concatenate([self.edge_dst, self.edge_src])
            order = np.argsort(ends, kind="stable")
            nbr = np.ascontiguousarray(other[order], dtype=np.int32)
            counts = np.bincount(ends, minlength=self.n_vertices)
            indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
            np.cumsum(counts, out=indptr[1:])
            self._csr = (indptr, nbr)
        return self._csr

    def vertex_point(self, vid: int) -> PointAddress:
        """Canonical address of a vertex: endpoint of its lowest-index edge."""
        if self._canonical is None:
            big = np.iinfo(np.int64).max
            first_src = np.full(self.n_vertices, big, dtype=np.int64)
            first_dst = np.full(self.n_vertices, big, dtype=np.int64)
            np.minimum.at(first_src, self.edge_src, np.arange(self.n_edges))
            np.minimum.at(first_dst, self.edge_dst, np.arange(self.n_edges))
            self._canonical = (first_src, first_dst)
        first_src, first_dst = self._canonical
        if not 0 <= vid < self.n_vertices:
            raise ValueError(f"vertex {vid} out of range")
        if first_src[vid] <= first_dst[vid]:
            return PointAddress(self.edge_word(int(first_src[vid])), Fraction(0))
        return PointAddress(self.edge_word(int(first_dst[vid])), self.edge_len)

    def export_json(self, fileobj: IO[str]) -> None:
        payload = {
            "schema": "diamondlim-graph/1",
            "level": self.level,
            "n_vertices": self.n_vertices,
            "n_edges": self.n_edges,
            "edge_length": format_fraction(self.edge_len),
            "edges": [
                {"word": self.edge_word(i), "src": int(self.edge_src[i]), "dst": int(self.edge_dst[i])}
                for i in range(self.n_edges)
            ],
        }
        json.dump(payload, fileobj, indent=2)

    def export_csv(self, fileobj: IO[str]) -> None:
        writer = csv.writer(fileobj)
        writer.writerow(["word", "src", "dst"])
        for i in range(self.n_edges):
            writer.writerow([self.edge_word(i), int(self.edge_src[i]), int(self.edge_dst[i])])


def build_level(n: int, budget: int | None = None) -> LevelGraph:
    """Build the level-n graph (and its full coarser chain) by refinement."""
    if n < 0:
        raise ValueError("level must be nonnegative")
    limit = max_level() if budget is None else min(int(budget), HARD_MAX_LEVEL)
    if n > limit:
        raise BudgetError(f"level {n} exceeds the budget of {limit} (6^{n} edges)")
    g = LevelGraph(0, 2, np.array([0], dtype=np.int32), np.array([1], dtype=np.int32))
    for _ in range(n):
        g = _refine(g)
    return g


def _refine(g: LevelGraph) -> LevelGraph:
    n_edges = g.n_edges
    base = (g.n_vertices + 4 * np.arange(n_edges, dtype=np.int64)).astype(np.int32)
    v1, vt, vb, v4 = base, base + 1, base + 2, base + 3
    src = np.empty((n_edges, 6), dtype=np.int32)
    dst = np.empty((n_edges, 6), dtype=np.int32)
    src[:, 0], dst[:, 0] = g.edge_src, v1
    src[:, 1], dst[:, 1] = v1, vt
    src[:, 2], dst[:, 2] = vt, v4
    src[:, 3], dst[:, 3] = v1, vb
    src[:, 4], dst[:, 4] = vb, v4
    src[:, 5], dst[:, 5] = v4, g.edge_dst
    return LevelGraph(g.level + 1, g.n_vertices + 4 * n_edges, src.ravel(), dst.ravel(), coarser=g)


def collapse_vertex_map(g: LevelGraph) -> dict[int, PointAddress]:
    """Image of every vertex of `g` one level down.

    Persisted vertices map to their own canonical address; the four vertices
    inserted on a parent edge land at its quarter points (top and bottom
    middles both hit the midpoint).
    """
    if g.coarser is None:
        raise ValueError("the level-0 graph has nothing to collapse onto")
    parent = g.coarser
    quarter = parent.edge_len / 4
    out = {v: parent.vertex_point(v) for v in range(parent.n_vertices)}
    for e in range(parent.n_edges):
        word = parent.edge_word(e)
        vid = parent.n_vertices + 4 * e
        out[vid] = PointAddress(word, quarter)
        out[vid + 1] = PointAddress(word, 2 * quarter)
        out[vid + 2] = PointAddress(word, 2 * quarter)
        out[vid + 3] = PointAddress(word, 3 * quarter)
    return out


def _check_point(g: LevelGraph, p: PointAddress) -> None:
    if p.level != g.level:
        raise ValueError(f"address level {p.level} does not match graph level {g.level}")


def _scale_for(g: LevelGraph, fracs) -> int:
    scale = 4**g.level
    for f in fracs:
        scale = math.lcm(scale, Fraction(f).denominator)
    if scale.bit_length() > _SCALE_BITS_LIMIT:
        raise ValueError("offset/radius denominators too large for the integer kernel")
    return scale


def sweep_distances(
    g: LevelGraph,
    center: PointAddress,
    bound: Fraction,
    extra_denoms: tuple[int, ...] = (),
):
    """Exact vertex distances from `center`, cut off at `bound`.

    Returns (dist, S): int64 distances in units of 1/S, -1 beyond the bound.
    `extra_denoms` folds further denominators into S so that callers can
    evaluate coverage at radii other than `bound` against the same sweep.
    """
    _check_point(g, center)
    bound = Fraction(bound)
    if bound < 0:
        raise ValueError("sweep bound must be nonnegative")
    scale = _scale_for(g, (center.offset, bound, *(Fraction(1, d) for d in extra_denoms)))
    elen = scale // 4**g.level
    t = int(center.offset * scale)
    e = g.edge_index(center.word)
    a, b = int(g.edge_src[e]), int(g.edge_dst[e])
    if t == 0:
        seeds = [(a, 0)]
    elif t == elen:
        seeds = [(b, 0)]
    else:
        seeds = [(a, t), (b, elen - t)]
    indptr, nbr = g.csr()
    src_v = np.array([v for v, _ in seeds], dtype=np.int32)
    src_d = np.array([d for _, d in seeds], dtype=np.int64)
    dist = kernels.bounded_dijkstra(indptr, nbr, elen, src_v, src_d, int(bound * scale))
    return dist, scale


def endpoint_cover(g: LevelGraph, dist: np.ndarray, scale: int, r: Fraction):
    """Covered length of each edge entered from its src / dst ends.

    `dist` must come from a sweep whose bound was >= r.  Lengths are in
    1/`scale` units; the center's own edge needs the direct-route correction
    from :func:`center_edge_segments` on top of these.
    """
    r_units = r * scale
    if r_units.denominator != 1:
        raise ValueError("radius denominator does not divide the sweep scale")
    r_i = int(r_units)
    elen = scale // 4**g.level
    da = dist[g.edge_src]
    db = dist[g.edge_dst]
    cov_a = np.where(da >= 0, np.clip(r_i - da, 0, elen), 0).astype(np.int64)
    cov_b = np.where(db >= 0, np.clip(r_i - db, 0, elen), 0).astype(np.int64)
    return cov_a, cov_b


def center_edge_segments(
    g: LevelGraph,
    center: PointAddress,
    dist: np.ndarray,
    scale: int,
    r: Fraction,
) -> list[tuple[int, int]]:
    """Covered sub-intervals of the center's own edge, merged, in 1/scale units.

    Points of that edge are reachable directly (|t - s|) as well as around
    through either endpoint, so up to three intervals must be merged.
    """
    elen = scale // 4**g.level
    t = int(center.offset * scale)
    r_i = int(r * scale)
    e = g.edge_index(center.word)
    intervals = [(max(0, t - r_i), min(elen, t + r_i))]
    da, db = int(dist[g.edge_src[e]]), int(dist[g.edge_dst[e]])
    if da >= 0 and r_i - da > 0:
        intervals.append((0, min(elen, r_i - da)))
    if db >= 0 and r_i - db > 0:
        intervals.append((max(0, elen - (r_i - db)), elen))
    intervals = [(lo, hi) for lo, hi in intervals if hi > lo]
    intervals.sort()
    merged: list[tuple[int, int]] = []
    for lo, hi in intervals:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def covered_length_units(
    g: LevelGraph,
    center: PointAddress,
    dist: np.ndarray,
    scale: int,
    r: Fraction,
) -> np.ndarray:
    """Total covered length per edge in 1/scale units (int64, exact)."""
    cov_a, cov_b = endpoint_cover(g, dist, scale, r)
    elen = scale // 4**g.level
    total = np.minimum(cov_a + cov_b, elen)
    e = g.edge_index(center.word)
    total[e] = sum(hi - lo for lo, hi in center_edge_segments(g, center, dist, scale, r))
    return total


@dataclass(frozen=True)
class BallCover:
    """Exact description of a closed metric ball as per-edge sub-intervals."""

    level: int
    center: PointAddress
    radius: Fraction
    segments: tuple[tuple[str, Fraction, Fraction], ...]

    @property
    def covered_length(self) -> Fraction:
        return sum((hi - lo for _, lo, hi in self.segments), Fraction(0))


def ball_cover(g: LevelGraph, center: PointAddress, r) -> BallCover:
    """Sweep outward from `center` and record every covered sub-interval.

    Segments have positive length (a radius-0 ball covers nothing) and are
    merged per edge, so each edge contributes at most two of them except the
    center's own edge.
    """
    r = Fraction(r)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    dist, scale = sweep_distances(g, center, r)
    cov_a, cov_b = endpoint_cover(g, dist, scale, r)
    elen = scale // 4**g.level
    e_center = g.edge_index(center.word)
    segments: list[tuple[str, Fraction, Fraction]] = []
    touched = np.nonzero((cov_a > 0) | (cov_b > 0))[0]
    for e in touched:
        if e == e_center:
            continue
        word = g.edge_word(int(e))
        a, b = int(cov_a[e]), int(cov_b[e])
        if a + b >= elen:
            segments.append((word, Fraction(0), Fraction(elen, scale)))
        else:
            if a > 0:
                segments.append((word, Fraction(0), Fraction(a, scale)))
            if b > 0:
                segments.append((word, Fraction(elen - b, scale), Fraction(elen, scale)))
    for lo, hi in center_edge_segments(g, center, dist, scale, r):
        segments.append((center.word, Fraction(lo, scale), Fraction(hi, scale)))
    segments.sort(key=lambda s: (index_of(s[0]), s[1]))
    return BallCover(level=g.level, center=center, radius=r, segments=tuple(segments))


def geodesic_distance(g: LevelGraph, p: PointAddress, q: PointAddress) -> Fraction:
    """Length of the shortest path between two addressed points, exact."""
    _check_point(g, p)
    _check_point(g, q)
    dist, scale = sweep_distances(g, p, g.diameter, extra_denoms=(q.offset.denominator,))
    elen = scale // 4**g.level
    tq = int(q.offset * scale)
    eq = g.edge_index(q.word)
    candidates = []
    da, db = int(dist[g.edge_src[eq]]), int(dist[g.edge_dst[eq]])
    if da >= 0:
        candidates.append(da + tq)
    if db >= 0:
        candidates.append(db + elen - tq)
    if p.word == q.word:
        candidates.append(abs(int(p.offset * scale) - tq))
    if not candidates:
        raise RuntimeError("graph is connected; a distance candidate must exist")
    return Fraction(min(candidates), scale)
