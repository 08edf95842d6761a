import io
import json
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from diamondlim import (
    BudgetError,
    PointAddress,
    ball_cover,
    build_level,
    chart_coordinate,
    collapse_vertex_map,
    geodesic_distance,
    project_point,
)
from diamondlim.graphs import max_level

from conftest import random_point


def closed_form_counts(level):
    return 2 + 4 * (6**level - 1) // 5, 6**level


@pytest.mark.parametrize("level", range(5))
def test_counts_match_closed_forms(graphs, level):
    g = graphs[level]
    vertices, edges = closed_form_counts(level)
    assert g.n_vertices == vertices
    assert g.n_edges == edges
    assert all(len(g.edge_word(i)) == level for i in range(0, g.n_edges, max(g.n_edges // 7, 1)))


def test_level_zero_shape(graphs):
    g = graphs[0]
    assert g.n_vertices == 2 and g.n_edges == 1


def test_graph_is_connected(graphs):
    g = graphs[3]
    indptr, nbr = g.csr()
    seen = np.zeros(g.n_vertices, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        v = stack.pop()
        for i in range(indptr[v], indptr[v + 1]):
            u = int(nbr[i])
            if not seen[u]:
                seen[u] = True
                stack.append(u)
    assert seen.all()


def test_endpoints_have_degree_one(graphs):
    g = graphs[2]
    indptr, _ = g.csr()
    degrees = np.diff(indptr)
    assert degrees[0] == 1 and degrees[1] == 1
    assert degrees.max() == 3


def test_budget_errors():
    with pytest.raises(BudgetError):
        build_level(max_level() + 1)
    with pytest.raises(BudgetError):
        build_level(11, budget=11)  # hard cap stays at 10
    with pytest.raises(ValueError):
        build_level(-1)


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("DIAMONDLIM_MAX_LEVEL", "2")
    with pytest.raises(BudgetError):
        build_level(3)
    assert build_level(2).n_edges == 36


# ---------------------------------------------------------------------------
# collapse maps


def test_collapse_top_bottom_middles_meet(graphs):
    cmap = collapse_vertex_map(graphs[1])
    # the four inserted vertices of the single parent edge are ids 2..5
    assert cmap[3] == PointAddress("", Fraction(1, 2))
    assert cmap[4] == PointAddress("", Fraction(1, 2))
    assert cmap[2] == PointAddress("", Fraction(1, 4))
    assert cmap[5] == PointAddress("", Fraction(3, 4))


def test_collapse_fixes_endpoints(graphs):
    cmap = collapse_vertex_map(graphs[1])
    assert chart_coordinate(cmap[0]) == 0
    assert chart_coordinate(cmap[1]) == 1


def test_collapse_composition_is_level_skip(graphs):
    g2 = graphs[2]
    cmap = collapse_vertex_map(g2)
    for v in range(g2.n_vertices):
        via_map = project_point(cmap[v], 0)
        direct = project_point(g2.vertex_point(v), 0)
        assert via_map == direct


def test_vertex_point_is_incident(graphs):
    g = graphs[2]
    for v in range(g.n_vertices):
        p = g.vertex_point(v)
        e = g.edge_index(p.word)
        end = g.edge_src[e] if p.offset == 0 else g.edge_dst[e]
        assert int(end) == v


# ---------------------------------------------------------------------------
# distances, with an independent subdivided-graph oracle


def oracle_graph(g, q=4):
    """networkx copy with q unit-weight sub-segments per edge."""
    H = nx.Graph()
    for e in range(g.n_edges):
        a, b = int(g.edge_src[e]), int(g.edge_dst[e])
        nodes = [("v", a)] + [("e", e, j) for j in range(1, q)] + [("v", b)]
        nx.add_path(H, nodes)
    return H


def oracle_distance(H, g, p, q_sub=4):
    def node_of(point):
        e = g.edge_index(point.word)
        j = point.offset / (g.edge_len / q_sub)
        assert j.denominator == 1, "oracle points must sit on the subdivision grid"
        j = int(j)
        if j == 0:
            return ("v", int(g.edge_src[e]))
        if j == q_sub:
            return ("v", int(g.edge_dst[e]))
        return ("e", e, j)

    units = nx.shortest_path_length(H, node_of(p[0]), node_of(p[1]))
    return units * (g.edge_len / q_sub)


def test_distance_examples(graphs):
    g1 = graphs[1]
    left = PointAddress("1", Fraction(0))
    right = PointAddress("6", g1.edge_len)
    assert geodesic_distance(g1, left, right) == 1
    vtop = PointAddress("2", g1.edge_len)
    vbot = PointAddress("4", g1.edge_len)
    assert geodesic_distance(g1, vtop, vbot) == Fraction(1, 2)
    assert geodesic_distance(g1, vtop, vtop) == 0


def test_endpoint_distance_is_one_every_level(graphs):
    for level in range(5):
        g = graphs[level]
        left = PointAddress("1" * level, Fraction(0))
        right = PointAddress("6" * level, g.edge_len)
        assert geodesic_distance(g, left, right) == 1


def test_distance_matches_subdivision_oracle(graphs, rng):
    for level in (1, 2, 3):
        g = graphs[level]
        H = oracle_graph(g)
        quarter = g.edge_len / 4
        for _ in range(40):
            pts = []
            for _ in range(2):
                e = int(rng.integers(g.n_edges))
                j = int(rng.integers(0, 5))
                pts.append(PointAddress(g.edge_word(e), j * quarter))
            assert geodesic_distance(g, pts[0], pts[1]) == oracle_distance(H, g, pts)


def test_distance_symmetry_and_triangle(graphs, rng):
    g = graphs[3]
    for _ in range(30):
        p, q, r = (random_point(rng, 3) for _ in range(3))
        dpq = geodesic_distance(g, p, q)
        assert dpq == geodesic_distance(g, q, p)
        assert dpq <= geodesic_distance(g, p, r) + geodesic_distance(g, r, q)


def test_vertex_diameter_is_one(graphs):
    for level in (1, 2):
        g = graphs[level]
        H = oracle_graph(g, q=1)
        lengths = dict(nx.all_pairs_shortest_path_length(H))
        worst = max(max(d.values()) for d in lengths.values())
        assert worst * g.edge_len == 1


def test_projections_are_one_lipschitz_and_monotone(graphs, rng):
    g4 = graphs[4]
    for _ in range(15):
        p, q = random_point(rng, 4), random_point(rng, 4)
        d_fine = geodesic_distance(g4, p, q)
        previous = d_fine
        for k in (3, 2, 1, 0):
            dk = geodesic_distance(graphs[k], project_point(p, k), project_point(q, k))
            assert dk <= previous  # distances only shrink toward coarser levels
            previous = dk


# ---------------------------------------------------------------------------
# metric balls


def covered(cover, point):
    return any(
        word == point.word and lo <= point.offset <= hi for word, lo, hi in cover.segments
    )


def test_ball_radius_zero_is_empty(graphs):
    cover = ball_cover(graphs[2], PointAddress.midpoint("23"), Fraction(0))
    assert cover.segments == ()
    assert cover.covered_length == 0


def test_ball_covers_everything_beyond_diameter(graphs):
    for level in (1, 2):
        g = graphs[level]
        cover = ball_cover(g, PointAddress.midpoint("2" + "3" * (level - 1)), Fraction(1))
        assert cover.covered_length == Fraction(6**level, 4**level)


def test_ball_unit_example(graphs):
    g = graphs[1]
    vtop = PointAddress("2", g.edge_len)
    cover = ball_cover(g, vtop, Fraction(1, 4))
    assert {(w, lo, hi) for w, lo, hi in cover.segments} == {
        ("2", Fraction(0), Fraction(1, 4)),
        ("3", Fraction(0), Fraction(1, 4)),
    }


def test_ball_membership_matches_distance_oracle(graphs, rng):
    g = graphs[2]
    H = oracle_graph(g)
    quarter = g.edge_len / 4
    grid_points = [
        PointAddress(g.edge_word(e), j * quarter) for e in range(g.n_edges) for j in range(5)
    ]
    for _ in range(12):
        center = grid_points[int(rng.integers(len(grid_points)))]
        r = int(rng.integers(1, 17)) * quarter
        cover = ball_cover(g, center, r)
        for s in grid_points[:: int(rng.integers(3, 7))]:
            d = oracle_distance(H, g, (center, s))
            if d < r:
                assert covered(cover, s), (center, s, r, d)
            elif d > r:
                assert not covered(cover, s), (center, s, r, d)
            # d == r: the boundary point may be an isolated atom, which the
            # positive-length segment convention drops


def test_ball_growth_monotone_and_continuous(graphs, rng):
    g = graphs[2]
    center = random_point(rng, 2)
    radii = [Fraction(k, 64) for k in range(0, 33, 2)]
    lengths = [ball_cover(g, center, r).covered_length for r in radii]
    for (r1, l1), (r2, l2) in zip(zip(radii, lengths), zip(radii[1:], lengths[1:])):
        assert l2 >= l1
        assert l2 - l1 <= 2 * g.n_edges * (r2 - r1)


def test_ball_segments_stay_inside_edges(graphs, rng):
    g = graphs[3]
    for _ in range(10):
        cover = ball_cover(g, random_point(rng, 3), Fraction(3, 32))
        for word, lo, hi in cover.segments:
            assert 0 <= lo < hi <= g.edge_len
            assert len(word) == 3


def test_level_mismatch_rejected(graphs):
    with pytest.raises(ValueError):
        geodesic_distance(graphs[2], PointAddress.midpoint("2"), PointAddress.midpoint("23"))


# ---------------------------------------------------------------------------
# exports


def test_export_json(graphs):
    buf = io.StringIO()
    graphs[1].export_json(buf)
    payload = json.loads(buf.getvalue())
    assert payload["level"] == 1
    assert payload["n_vertices"] == 6
    assert payload["edge_length"] == "1/4"
    words = [e["word"] for e in payload["edges"]]
    assert words == ["1", "2", "3", "4", "5", "6"]
    by_word = {e["word"]: e for e in payload["edges"]}
    assert by_word["1"]["src"] == 0
    assert by_word["6"]["dst"] == 1
    # top and bottom branches share their quarter vertices
    assert by_word["2"]["src"] == by_word["4"]["src"]
    assert by_word["3"]["dst"] == by_word["5"]["dst"]


def test_export_csv(graphs):
    buf = io.StringIO()
    graphs[1].export_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "word,src,dst"
    assert len(lines) == 7
