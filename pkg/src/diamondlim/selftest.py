"""Fast exact-identity suite behind the `selftest` CLI command.

Each check exercises an identity that holds by construction; any failure
means a broken invariant, not statistical noise.  `density_corruption` is a
negative-control hook: values != 1 perturb one refinement factor so tests can
confirm the suite actually catches a bad density.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .addresses import PointAddress, chart_coordinate, project_point, truncate, word_at
from .certificates import affinity_factor, hellinger_affinity
from .graphs import ball_cover, build_level
from .measures import MeasureSpec, edge_mass, level_masses
from .measures import ball_mass as _ball_mass

_W_GRID = (0.3, 0.5, 0.7)


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def _check_counts() -> CheckResult:
    for level in range(4):
        g = build_level(level)
        edges = 6**level
        vertices = 2 + 4 * (6**level - 1) // 5
        if g.n_edges != edges or g.n_vertices != vertices:
            return CheckResult(
                "vertex_edge_counts",
                False,
                f"level {level}: got ({g.n_vertices}, {g.n_edges}), want ({vertices}, {edges})",
            )
    return CheckResult("vertex_edge_counts", True, "levels 0-3 match the closed forms")


def _check_normalization() -> CheckResult:
    worst = 0.0
    for level in range(5):
        for w in _W_GRID:
            worst = max(worst, abs(float(level_masses(level, w).sum()) - 1.0))
    ok = worst < 1e-12
    return CheckResult("mass_normalization", ok, f"max |total-1| = {worst:.2e} (levels 0-4)")


def _check_pushforward(corruption: float) -> CheckResult:
    worst = 0.0
    for level in range(3):
        for i in range(6**level):
            word = word_at(level, i)
            for w in _W_GRID:
                parent = edge_mass(word, w)
                children = 0.0
                for d in "123456":
                    mass = edge_mass(word + d, w)
                    if d == "2":
                        mass *= corruption
                    children += mass
                worst = max(worst, abs(parent - children))
    ok = worst < 1e-12
    return CheckResult("pushforward_consistency", ok, f"max residual = {worst:.2e} (levels 0-2)")


def _check_projection() -> CheckResult:
    rng = np.random.default_rng(20240)
    for _ in range(300):
        n = int(rng.integers(1, 7))
        word = "".join(str(d) for d in rng.integers(1, 7, size=n))
        offset = Fraction(int(rng.integers(0, 4**n + 1)), 4**n) * Fraction(1, 4**n)
        p = PointAddress(word, offset)
        k = int(rng.integers(0, n + 1))
        mm = int(rng.integers(0, k + 1))
        if truncate(truncate(word, k), mm) != truncate(word, mm):
            return CheckResult("projection_compatibility", False, f"truncate broke on {word}")
        if project_point(project_point(p, k), mm) != project_point(p, mm):
            return CheckResult("projection_compatibility", False, f"project broke on {word}")
        if chart_coordinate(project_point(p, k)) != chart_coordinate(p):
            return CheckResult("projection_compatibility", False, f"chart broke on {word}")
    return CheckResult("projection_compatibility", True, "300 random addresses, exact")


def _check_affinity() -> CheckResult:
    worst = 0.0
    for level in range(1, 5):
        rho = affinity_factor(0.25, 0.75)
        worst = max(worst, abs(hellinger_affinity(level, 0.25, 0.75) - rho**level))
    ok = worst < 1e-10
    return CheckResult("affinity_closed_form", ok, f"max |sum - rho^n| = {worst:.2e} (levels 1-4)")


def _check_ball() -> CheckResult:
    g = build_level(1)
    vtop = PointAddress("2", g.edge_len)  # end vertex of the top-left edge
    cover = ball_cover(g, vtop, Fraction(1, 4))
    words = sorted({w for w, _, _ in cover.segments})
    full = all(hi - lo == g.edge_len for _, lo, hi in cover.segments)
    mass = _ball_mass(cover, MeasureSpec(0.3))
    ok = words == ["2", "3"] and full and abs(mass - 0.15) < 1e-15
    return CheckResult("ball_cover_unit", ok, f"covered={words}, mass(w=0.3)={mass}")


def run_selftest(density_corruption: float = 1.0) -> list[CheckResult]:
    """Run every identity check; corruption != 1 should trip pushforward only."""
    return [
        _check_counts(),
        _check_normalization(),
        _check_pushforward(density_corruption),
        _check_projection(),
        _check_affinity(),
        _check_ball(),
    ]
