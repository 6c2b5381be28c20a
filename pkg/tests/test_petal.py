import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prismunfold import (
    GeometryError,
    PetalChoice,
    build_band,
    count_choices,
    develop,
    enumerate_choices,
    parse_choice,
    sample_choices,
)
from prismunfold.instances import FIXTURES, from_xy, random_convex_polygon
from prismunfold.petal import uncut_edges


def face_graph(band):
    """Face adjacency of the whole surface: (fixed edges, lateral edges, top edges)."""
    n = band.n
    fixed = [("base", f"B{i + 1}") for i in range(n)]
    faces = [f.name for f in band.faces]
    lateral = [(faces[k], faces[(k + 1) % len(faces)]) for k in range(len(faces))]
    top = [(f"A{j + 1}", "top") for j in range(band.m)]
    return fixed, lateral, top


def petal_trees(band):
    """Spanning trees keeping every base edge and exactly one top edge, by brute force."""
    fixed, lateral, top = face_graph(band)
    trees = set()
    for keep_top in top:
        for r in range(len(lateral) + 1):
            for subset in itertools.combinations(lateral, r):
                G = nx.Graph(fixed + list(subset) + [keep_top])
                G.add_nodes_from(["top"] + [f.name for f in band.faces])
                if nx.is_tree(G):
                    trees.add(frozenset(frozenset(e) for e in G.edges))
    return trees


@pytest.mark.parametrize("name", FIXTURES)
def test_count_matches_spanning_tree_oracle(bands, name):
    band = bands[name]
    trees = petal_trees(band)
    assert count_choices(band) == len(trees)
    mine = {frozenset(frozenset(e) for e in uncut_edges(band, c)) for c in enumerate_choices(band)}
    assert mine == trees


def test_fixture_counts(bands):
    assert count_choices(bands["pc"]) == 24
    assert count_choices(bands["pcyc"]) == 24
    assert count_choices(bands["square_antiprismoid"]) == 64


def test_choice_spec_round_trip():
    c = parse_choice("fanSplit=0,1,0,1;topEdge=3")
    assert c == PetalChoice((0, 1, 0, 1), 2)
    assert parse_choice(str(c)) == c
    with pytest.raises(ValueError):
        parse_choice("fanSplit=0,1;topEdge=0")
    with pytest.raises(ValueError):
        parse_choice("split=1")


def test_choice_band_mismatch(bands):
    with pytest.raises(GeometryError, match="mismatch"):
        develop(bands["pc"], PetalChoice((0, 2, 0, 0), 0))
    with pytest.raises(GeometryError, match="mismatch"):
        develop(bands["pc"], PetalChoice((0, 0, 0), 0))


def test_enumeration_distinct(bands):
    for band in bands.values():
        cs = list(enumerate_choices(band))
        assert len(cs) == len(set(cs)) == count_choices(band)


def test_sampling_is_seeded(bands):
    band = bands["square_antiprismoid"]
    assert list(sample_choices(band, 10, 7)) == list(sample_choices(band, 10, 7))


def _edge_lengths_preserved(band, layout, rtol):
    p = band.prismatoid
    for f in layout.faces:
        k = len(f.labels)
        for s in range(k):
            u, v = f.labels[s], f.labels[(s + 1) % k]
            L3 = np.linalg.norm(p.point(u) - p.point(v))
            L2 = np.linalg.norm(f.point(u) - f.point(v))
            assert abs(L2 - L3) <= rtol * L3, (f.name, u, v)


def _surface_area(band):
    p = band.prismatoid
    total = 0.0
    for f in band.faces:
        c = band.coords(f)
        total += 0.5 * np.linalg.norm(np.cross(c[1] - c[0], c[2] - c[0]))
    for P in (p.top2, p.base2):
        x, y = P[:, 0], P[:, 1]
        total += 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    return total


@pytest.mark.parametrize("name", FIXTURES)
def test_development_invariants(bands, name):
    band = bands[name]
    area = _surface_area(band)
    for c in enumerate_choices(band):
        layout = develop(band, c)
        assert len(layout) == band.n + band.m + 2
        _edge_lengths_preserved(band, layout, 1e-9)
        assert layout.area == pytest.approx(area, rel=1e-8)
        assert np.array_equal(layout["base"].coords, band.prismatoid.base2)


def test_shared_vertices_agree_along_hinges(bands):
    band = bands["square_antiprismoid"]
    for c in enumerate_choices(band):
        layout = develop(band, c)
        for f in layout.faces:
            if f.parent is None:
                continue
            parent = layout[f.parent]
            for v in f.hinge:
                assert np.allclose(f.point(v), parent.point(v), atol=1e-12)


def test_petals_hang_from_b_triangles(bands):
    band = bands["pc"]
    layout = develop(band, parse_choice("fanSplit=0,1,0,1;topEdge=2"))
    assert layout.petal_of("base") is None
    assert layout.petal_of("A1") == "B1"
    # fan at b3 is split at 0, so A2 hangs from the B-triangle after it
    assert layout.petal_of("A2") == "B3"
    assert layout.petal_of("top") == "B3"


def _rot(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


@pytest.mark.parametrize("name", FIXTURES)
def test_rotation_about_z_commutes_with_development(fixtures, name):
    p = fixtures[name]
    R = _rot(0.9)
    q = p.transformed(lambda P: np.asarray(P) @ R.T)
    b1, b2 = build_band(p), build_band(q)
    assert b1.fans == b2.fans
    for c in enumerate_choices(b1):
        L1, L2 = develop(b1, c), develop(b2, c)
        for f1, f2 in zip(L1.faces, L2.faces):
            assert np.allclose(f1.coords @ R[:2, :2].T, f2.coords, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_development_invariants_random(seed):
    rng = np.random.default_rng(seed)
    base = random_convex_polygon(rng, int(rng.integers(3, 7)), rng.uniform(0.5, 2), rng.uniform(0.5, 2))
    top = random_convex_polygon(rng, int(rng.integers(3, 7)), rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5))
    band = build_band(from_xy(top + rng.uniform(-1, 1, 2), base, rng.uniform(0.2, 3)))
    area = _surface_area(band)
    for c in sample_choices(band, 5, seed):
        layout = develop(band, c)
        _edge_lengths_preserved(band, layout, 1e-9)
        assert layout.area == pytest.approx(area, rel=1e-8)
