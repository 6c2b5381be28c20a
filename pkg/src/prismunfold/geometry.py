"""Planar and spatial primitives shared by the rest of the package.

Points are plain sequences or numpy arrays; everything returned is a numpy
array or a python float.  Regions are closed intersections of half-planes and
may be unbounded, so nothing here ever clips against a bounding box to decide
membership.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GeometryError",
    "TolerancePolicy",
    "DEFAULT_POLICY",
    "EXACT_POLICY",
    "Ray2",
    "HalfPlane",
    "ConvexRegion",
    "RegionIntersection",
    "orient2d",
    "orient2d_value",
    "angle_at",
    "develop_point",
    "develop_across_hinge",
    "region_intersects",
    "polygon_area",
    "ensure_ccw",
    "clip_polygon",
    "convex_intersection",
    "separating_depth",
]


class GeometryError(ValueError):
    """Raised for degenerate or inconsistent geometric input."""


@dataclass(frozen=True)
class TolerancePolicy:
    eps_predicate: float = 1e-9
    eps_area: float = 1e-12
    mode: str = "float"

    def __post_init__(self):
        if self.eps_predicate <= 0 or self.eps_area <= 0:
            raise ValueError("tolerances must be positive")
        if self.mode not in ("float", "exact"):
            raise ValueError(f"unknown arithmetic mode {self.mode!r}")

    @property
    def exact(self) -> bool:
        return self.mode == "exact"


DEFAULT_POLICY = TolerancePolicy()
EXACT_POLICY = TolerancePolicy(mode="exact")


def to_rational(x) -> Fraction:
    """Exact rational for a coordinate, reading floats by their shortest repr.

    ``0.1`` becomes ``1/10`` rather than the binary expansion, so table values
    with a few decimals are represented exactly.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(repr(float(x)))


def orient2d_value(p, q, r) -> float:
    """Twice the signed area of triangle pqr (float)."""
    return float((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))


def orient2d(p, q, r, policy: TolerancePolicy = DEFAULT_POLICY) -> int:
    """Sign of the turn p -> q -> r: +1 counterclockwise, -1 clockwise, 0 collinear."""
    if policy.exact:
        p, q, r = ([to_rational(c) for c in pt[:2]] for pt in (p, q, r))
        det = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        return (det > 0) - (det < 0)
    det = orient2d_value(p, q, r)
    if abs(det) <= policy.eps_predicate:
        return 0
    return 1 if det > 0 else -1


def angle_at(v, p, q) -> float:
    """Angle in [0, pi] at ``v`` between the rays v->p and v->q (2D or 3D)."""
    u = [float(a) - float(b) for a, b in zip(p, v)]
    w = [float(a) - float(b) for a, b in zip(q, v)]
    if not any(u) or not any(w):
        raise GeometryError("zero-length ray")
    dot = sum(a * b for a, b in zip(u, w))
    if len(u) == 2:
        return math.atan2(abs(u[0] * w[1] - u[1] * w[0]), dot)
    cx = u[1] * w[2] - u[2] * w[1]
    cy = u[2] * w[0] - u[0] * w[2]
    cz = u[0] * w[1] - u[1] * w[0]
    return math.atan2(math.sqrt(cx * cx + cy * cy + cz * cz), dot)


@dataclass(frozen=True)
class Ray2:
    origin: tuple[float, float]
    direction: tuple[float, float]

    def __post_init__(self):
        n = math.hypot(*self.direction)
        if n == 0:
            raise GeometryError("zero-length ray")
        if abs(n - 1.0) > 1e-12:
            object.__setattr__(self, "direction", (self.direction[0] / n, self.direction[1] / n))

    @classmethod
    def through(cls, origin, point) -> "Ray2":
        return cls((float(origin[0]), float(origin[1])),
                   (float(point[0] - origin[0]), float(point[1] - origin[1])))

    def at(self, t: float) -> np.ndarray:
        return np.asarray(self.origin) + t * np.asarray(self.direction)

    def distance_to(self, p) -> float:
        o = np.asarray(self.origin)
        d = np.asarray(self.direction)
        t = max(0.0, float(np.dot(np.asarray(p, dtype=float) - o, d)))
        return float(np.linalg.norm(np.asarray(p, dtype=float) - (o + t * d)))


def _frame(h0, h1, q):
    """Coordinates of ``q`` along and away from the hinge line h0 -> h1."""
    e = h1 - h0
    length = float(np.linalg.norm(e))
    if length == 0:
        raise GeometryError("zero-length hinge")
    e = e / length
    rel = q - h0
    along = float(np.dot(rel, e))
    away = float(np.linalg.norm(rel - along * e))
    return length, along, away


def develop_point(q, h0, h1, P0, P1, side: str, rtol: float = 1e-9) -> np.ndarray:
    """Planar image of ``q`` when its face is unrolled about the hinge h0-h1.

    The hinge is placed at P0 -> P1 and the image lands on ``side`` ('left' or
    'right') of that directed segment.  ``q`` must lie in the face plane and off
    the hinge line.
    """
    q, h0, h1 = (np.asarray(x, dtype=float) for x in (q, h0, h1))
    P0, P1 = np.asarray(P0, dtype=float), np.asarray(P1, dtype=float)
    length, along, away = _frame(h0, h1, q)
    E = P1 - P0
    placed = float(np.hypot(*E))
    if abs(placed - length) > rtol * max(length, 1.0):
        raise GeometryError("non-isometric placement")
    if away <= rtol * length:
        raise GeometryError("degenerate face: vertex on hinge line")
    E = E / placed
    N = np.array([-E[1], E[0]])
    if side == "right":
        N = -N
    elif side != "left":
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return P0 + along * E + away * N


def develop_across_hinge(face: Sequence, hinge: tuple[int, int], placed_hinge, side: str) -> np.ndarray:
    """Develop the vertex of a 3D triangle that is not on ``hinge``.

    ``hinge`` is a pair of vertex indices into ``face``; ``placed_hinge`` gives
    their planar positions in the same order.
    """
    face = np.asarray(face, dtype=float)
    if face.shape != (3, 3):
        raise GeometryError("face must be a 3D triangle")
    i, j = hinge
    (k,) = {0, 1, 2} - {i, j}
    P0, P1 = placed_hinge
    return develop_point(face[k], face[i], face[j], P0, P1, side)


@dataclass(frozen=True)
class HalfPlane:
    """The closed set a*x + b*y <= c."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise GeometryError("half-plane normal is zero")

    @classmethod
    def left_of(cls, p, q) -> "HalfPlane":
        """Closed side to the left of the directed line p -> q."""
        dx, dy = float(q[0] - p[0]), float(q[1] - p[1])
        return cls(dy, -dx, dy * float(p[0]) - dx * float(p[1]))

    @classmethod
    def behind(cls, point, normal) -> "HalfPlane":
        """Points x with (x - point) . normal <= 0."""
        nx, ny = float(normal[0]), float(normal[1])
        return cls(nx, ny, nx * float(point[0]) + ny * float(point[1]))

    def normalized(self) -> "HalfPlane":
        n = math.hypot(self.a, self.b)
        return HalfPlane(self.a / n, self.b / n, self.c / n)

    def signed_distance(self, p) -> float:
        """Positive outside, negative inside, in units of length."""
        n = math.hypot(self.a, self.b)
        return (self.a * float(p[0]) + self.b * float(p[1]) - self.c) / n

    def flipped(self) -> "HalfPlane":
        return HalfPlane(-self.a, -self.b, -self.c)


@dataclass(frozen=True)
class ConvexRegion:
    halfplanes: tuple[HalfPlane, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "halfplanes", tuple(self.halfplanes))

    def contains(self, p, eps: float = 1e-9, strict: bool = False) -> bool:
        d = [h.signed_distance(p) for h in self.halfplanes]
        if strict:
            return all(x < -eps for x in d)
        return all(x <= eps for x in d)

    def contains_direction(self, d, eps: float = 1e-12) -> bool:
        """Whether ``d`` lies in the recession cone (rays in direction d stay inside)."""
        return all(h.a * d[0] + h.b * d[1] <= eps * math.hypot(h.a, h.b) for h in self.halfplanes)

    def intersect(self, other: "ConvexRegion", label: str = "") -> "ConvexRegion":
        return ConvexRegion(self.halfplanes + other.halfplanes, label)

    def clip(self, polygon) -> np.ndarray:
        return clip_polygon(polygon, self.halfplanes)


@dataclass(frozen=True)
class RegionIntersection:
    kind: str  # "disjoint" | "touching" | "overlapping"
    depth: float
    witness: np.ndarray | None = None

    @property
    def overlapping(self) -> bool:
        return self.kind == "overlapping"


def _scale(halfplanes: Sequence[HalfPlane]) -> float:
    return max((abs(h.c) for h in halfplanes), default=0.0) + 1.0


def max_inscribed_disk(halfplanes: Sequence[HalfPlane]) -> tuple[float, np.ndarray | None]:
    """Largest t such that a disk of radius t fits in every half-plane.

    Negative t measures how far the constraints are from being jointly
    feasible.  This is a 3-variable LP (x, y, t) solved by enumerating the
    vertices of the feasible polytope; the constraint counts here are small.
    A far-away box and a cap on t keep the LP bounded for unbounded regions.
    """
    hs = [h.normalized() for h in halfplanes]
    R = 1e3 * _scale(hs)
    rows = [(h.a, h.b, 1.0, h.c) for h in hs]
    rows += [(1.0, 0.0, 0.0, R), (-1.0, 0.0, 0.0, R), (0.0, 1.0, 0.0, R), (0.0, -1.0, 0.0, R)]
    rows.append((0.0, 0.0, 1.0, R))
    M = np.array(rows)
    A, c = M[:, :3], M[:, 3]
    triples = np.array(list(itertools.combinations(range(len(M)), 3)))
    As = A[triples]
    dets = np.linalg.det(As)
    ok = np.abs(dets) > 1e-12
    if not np.any(ok):
        return -math.inf, None
    sols = np.linalg.solve(As[ok], c[triples[ok]][..., None])[..., 0]
    resid = sols @ A.T - c
    feasible = np.all(resid <= 1e-9 * R, axis=1)
    if not np.any(feasible):
        return -math.inf, None
    cand = sols[feasible]
    best = int(np.argmax(cand[:, 2]))
    return float(cand[best, 2]), cand[best, :2].copy()


def region_intersects(r1: ConvexRegion, r2: ConvexRegion, eps: float = 1e-9) -> RegionIntersection:
    """Classify two closed convex regions as disjoint, touching or overlapping.

    Overlapping means the interiors meet; the witness is then the centre of a
    disk of radius ``depth`` lying inside both regions.
    """
    t, x = max_inscribed_disk(r1.halfplanes + r2.halfplanes)
    if t > eps:
        return RegionIntersection("overlapping", t, x)
    if t >= -eps:
        return RegionIntersection("touching", t, None)
    return RegionIntersection("disjoint", t, None)


def polygon_area(poly) -> float:
    """Signed shoelace area (positive for counterclockwise)."""
    P = np.asarray(poly, dtype=float)
    if len(P) < 3:
        return 0.0
    x, y = P[:, 0], P[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def ensure_ccw(poly) -> np.ndarray:
    P = np.asarray(poly, dtype=float)
    return P if polygon_area(P) >= 0 else P[::-1].copy()


def _clip_one(P: np.ndarray, h: HalfPlane) -> np.ndarray:
    if len(P) == 0:
        return P
    vals = P @ np.array([h.a, h.b]) - h.c
    out = []
    n = len(P)
    for k in range(n):
        cur, nxt = P[k], P[(k + 1) % n]
        vc, vn = vals[k], vals[(k + 1) % n]
        if vc <= 0:
            out.append(cur)
        if (vc < 0 < vn) or (vn < 0 < vc):
            s = vc / (vc - vn)
            out.append(cur + s * (nxt - cur))
    return np.array(out).reshape(-1, 2)


def clip_polygon(poly, halfplanes: Iterable[HalfPlane]) -> np.ndarray:
    """Sutherland-Hodgman clip of a polygon against half-planes (unbounded ok)."""
    P = np.asarray(poly, dtype=float)
    for h in halfplanes:
        P = _clip_one(P, h)
        if len(P) == 0:
            break
    return P


def edge_halfplanes(poly) -> list[HalfPlane]:
    P = ensure_ccw(poly)
    return [HalfPlane.left_of(P[k], P[(k + 1) % len(P)]) for k in range(len(P))]


def convex_intersection(p1, p2) -> np.ndarray:
    return clip_polygon(p1, edge_halfplanes(p2))


def separating_depth(p1, p2) -> float:
    """Smallest projected overlap over all edge normals of two convex polygons.

    Positive means the interiors intersect (by at least that width along
    every candidate axis); zero or negative means a separating axis exists.
    """
    P1 = np.asarray(p1, dtype=float)
    P2 = np.asarray(p2, dtype=float)
    best = math.inf
    for P in (P1, P2):
        E = np.roll(P, -1, axis=0) - P
        lens = np.hypot(E[:, 0], E[:, 1])
        N = np.stack([-E[:, 1], E[:, 0]], axis=1)[lens > 0] / lens[lens > 0, None]
        s1 = P1 @ N.T
        s2 = P2 @ N.T
        overlap = np.minimum(s1.max(0), s2.max(0)) - np.maximum(s1.min(0), s2.min(0))
        best = min(best, float(overlap.min()))
    return best
