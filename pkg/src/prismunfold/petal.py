"""Petal unfoldings: cut choices, their enumeration, and planar development.

A petal unfolding keeps every base edge, so each B-triangle hangs off its base
edge.  At base vertex ``b_i`` the fan of A-triangles between ``B_{i-1}`` and
``B_i`` is split once: the first ``k`` triangles chain off ``B_{i-1}``, the
rest chain off ``B_i``.  Exactly one top edge stays uncut and carries the top.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .geometry import GeometryError, develop_point, orient2d_value, polygon_area
from .prismatoid import Band, Prismatoid, build_band

__all__ = [
    "PetalChoice",
    "PlacedFace",
    "Layout",
    "count_choices",
    "enumerate_choices",
    "sample_choices",
    "parse_choice",
    "uncut_edges",
    "develop",
    "all_layouts",
    "place_b_triangles",
]


@dataclass(frozen=True)
class PetalChoice:
    fan_split: tuple[int, ...]
    top_edge: int  # 0-based index j of the uncut top edge a_j a_{j+1}

    def __str__(self) -> str:
        return f"fanSplit={','.join(map(str, self.fan_split))};topEdge={self.top_edge + 1}"

    def check(self, band: Band) -> None:
        if len(self.fan_split) != band.n or not 0 <= self.top_edge < band.m:
            raise GeometryError("choice/band mismatch")
        for k, fan in zip(self.fan_split, band.fans):
            if not 0 <= k <= len(fan):
                raise GeometryError("choice/band mismatch")


_CHOICE_RE = re.compile(r"^\s*fanSplit\s*=\s*([\d,\s]*)\s*;\s*topEdge\s*=\s*(\d+)\s*$")


def parse_choice(spec: str) -> PetalChoice:
    """Parse ``fanSplit=k1,...,kn;topEdge=j`` (``j`` counts from 1)."""
    m = _CHOICE_RE.match(spec)
    if not m:
        raise ValueError(f"bad choice spec {spec!r}")
    splits = tuple(int(x) for x in m.group(1).split(",") if x.strip())
    j = int(m.group(2))
    if j < 1:
        raise ValueError("topEdge counts from 1")
    return PetalChoice(splits, j - 1)


def count_choices(band: Band) -> int:
    return band.m * math.prod(len(f) + 1 for f in band.fans)


def enumerate_choices(band: Band) -> Iterator[PetalChoice]:
    """Every petal choice once, lexicographic in fan splits then top edge."""
    for splits in itertools.product(*(range(len(f) + 1) for f in band.fans)):
        for j in range(band.m):
            yield PetalChoice(tuple(splits), j)


def sample_choices(band: Band, k: int, seed: int) -> Iterator[PetalChoice]:
    """``k`` independent uniform draws from the choice set."""
    rng = random.Random(seed)
    for _ in range(k):
        yield PetalChoice(tuple(rng.randint(0, len(f)) for f in band.fans), rng.randrange(band.m))


def uncut_edges(band: Band, c: PetalChoice) -> list[tuple[str, str]]:
    """Face-adjacency edges kept by choice ``c`` (the hinges of the layout)."""
    c.check(band)
    n = band.n
    edges = [("base", f"B{i + 1}") for i in range(n)]
    for i, (fan, k) in enumerate(zip(band.fans, c.fan_split)):
        chain = [f"B{(i - 1) % n + 1}"] + [f"A{j + 1}" for j in fan] + [f"B{i + 1}"]
        # chain[k] -- chain[k+1] is the cut lateral edge
        edges += [(chain[t], chain[t + 1]) for t in range(len(chain) - 1) if t != k]
    edges.append((f"A{c.top_edge + 1}", "top"))
    return edges


@dataclass(frozen=True)
class PlacedFace:
    name: str
    labels: tuple[str, ...]
    coords: np.ndarray
    parent: str | None = None
    hinge: tuple[str, str] | None = None

    def point(self, label: str) -> np.ndarray:
        return self.coords[self.labels.index(label)]

    @property
    def area(self) -> float:
        return abs(polygon_area(self.coords))


@dataclass(frozen=True)
class Layout:
    choice: PetalChoice
    faces: tuple[PlacedFace, ...]

    def __getitem__(self, name: str) -> PlacedFace:
        for f in self.faces:
            if f.name == name:
                return f
        raise KeyError(name)

    def __len__(self) -> int:
        return len(self.faces)

    @property
    def area(self) -> float:
        return sum(f.area for f in self.faces)

    def petal_of(self, name: str) -> str | None:
        """B-triangle whose petal contains face ``name`` (None for the base)."""
        f = self[name]
        while f.parent not in (None, "base"):
            f = self[f.parent]
        return None if f.parent is None else f.name


def _away_side(parent: PlacedFace, P0, P1) -> str:
    ctr = parent.coords.mean(axis=0)
    return "right" if orient2d_value(P0, P1, ctr) > 0 else "left"


def _attach(p: Prismatoid, parent: PlacedFace, name: str, labels, hinge) -> PlacedFace:
    """Unroll the face with vertex ``labels`` across ``hinge``, away from ``parent``."""
    h0, h1 = hinge
    P0, P1 = parent.point(h0), parent.point(h1)
    side = _away_side(parent, P0, P1)
    X0, X1 = p.point(h0), p.point(h1)
    coords = []
    for v in labels:
        if v == h0:
            coords.append(P0)
        elif v == h1:
            coords.append(P1)
        else:
            coords.append(develop_point(p.point(v), X0, X1, P0, P1, side))
    return PlacedFace(name, tuple(labels), np.array(coords), parent.name, (h0, h1))


def develop(band: Band, c: PetalChoice) -> Layout:
    """Planar layout of the petal unfolding ``c``; the base keeps its xy coordinates."""
    c.check(band)
    p = band.prismatoid
    n = band.n
    placed = place_b_triangles(band)
    for i, (fan, k) in enumerate(zip(band.fans, c.fan_split)):
        bi = f"b{i + 1}"
        parent = placed[f"B{(i - 1) % n + 1}"]
        for j in fan[:k]:
            f = band.a_face(j)
            parent = placed[f.name] = _attach(p, parent, f.name, f.vertices, (bi, f.vertices[0]))
        parent = placed[f"B{i + 1}"]
        for j in reversed(fan[k:]):
            f = band.a_face(j)
            parent = placed[f.name] = _attach(p, parent, f.name, f.vertices, (bi, f.vertices[1]))

    carrier = placed[f"A{c.top_edge + 1}"]
    top_labels = tuple(f"a{j + 1}" for j in range(band.m))
    hinge = carrier.labels[:2]
    placed["top"] = _attach(p, carrier, "top", top_labels, hinge)

    order = ["base"] + [f.name for f in band.faces] + ["top"]
    return Layout(c, tuple(placed[k] for k in order))


def all_layouts(p: Prismatoid, band: Band | None = None) -> Iterator[tuple[PetalChoice, Layout]]:
    band = band or build_band(p)
    for c in enumerate_choices(band):
        yield c, develop(band, c)


def place_b_triangles(band: Band) -> dict[str, PlacedFace]:
    """The base and every B-triangle unrolled about its base edge (choice independent)."""
    p = band.prismatoid
    base = PlacedFace("base", tuple(f"b{i + 1}" for i in range(band.n)), p.base2.copy())
    placed = {"base": base}
    for i in range(band.n):
        f = band.b_face(i)
        placed[f.name] = _attach(p, base, f.name, f.vertices, f.vertices[:2])
    return placed
