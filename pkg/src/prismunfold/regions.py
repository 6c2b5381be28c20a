"""Overlap detection on layouts, and the diamond/wedge regions around fans.

For base vertex ``b_i`` let ``a_j'`` and ``a_k'`` be the apices of ``B_{i-1}``
and ``B_i`` after unrolling both about their base edges.  The wedge ``V_i`` is
the angular sector at ``b_i`` swept counterclockwise from ``a_j'`` to
``a_k'`` (the side away from the base); the diamond ``D_i`` is ``V_i`` cut by
the lines through ``a_j'`` and ``a_k'`` perpendicular to the two segments.
Sectors wider than a half-turn are stored as two convex pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    DEFAULT_POLICY,
    ConvexRegion,
    GeometryError,
    HalfPlane,
    Ray2,
    RegionIntersection,
    TolerancePolicy,
    clip_polygon,
    convex_intersection,
    edge_halfplanes,
    ensure_ccw,
    polygon_area,
    region_intersects,
    separating_depth,
)
from .petal import Layout, PlacedFace, place_b_triangles
from .prismatoid import Band, Prismatoid, build_band

__all__ = [
    "OverlapWitness",
    "OverlapReport",
    "FanRegion",
    "CertificateResult",
    "SContainment",
    "check_overlap",
    "wedge",
    "diamond",
    "regions_intersect",
    "penetration_angle",
    "polygon_in_region",
    "orourke_certificate",
    "rectangle_S_containment",
]


@dataclass(frozen=True)
class OverlapWitness:
    faces: tuple[str, str]
    point: np.ndarray
    area: float


@dataclass(frozen=True)
class OverlapReport:
    witnesses: tuple[OverlapWitness, ...] = ()
    max_penetration_angle: float | None = None

    @property
    def overlapping(self) -> bool:
        return bool(self.witnesses)


def check_overlap(layout: Layout, policy: TolerancePolicy = DEFAULT_POLICY) -> OverlapReport:
    """Report every pair of placed faces whose interiors intersect.

    Faces meeting along a hinge or at a point never count.  A pair is reported
    only if it has no separating axis by more than ``eps_predicate`` and the
    clipped intersection has area above ``eps_area``.
    """
    faces = [ensure_ccw(f.coords) for f in layout.faces]
    lo = np.array([f.min(axis=0) for f in faces])
    hi = np.array([f.max(axis=0) for f in faces])
    out = []
    for s in range(len(faces)):
        for t in range(s + 1, len(faces)):
            if np.any(lo[s] >= hi[t] - policy.eps_predicate) or np.any(lo[t] >= hi[s] - policy.eps_predicate):
                continue
            if separating_depth(faces[s], faces[t]) <= policy.eps_predicate:
                continue
            inter = convex_intersection(faces[s], faces[t])
            area = abs(polygon_area(inter))
            if area > policy.eps_area:
                pt = inter.mean(axis=0)
                out.append(OverlapWitness((layout.faces[s].name, layout.faces[t].name), pt, area))
    return OverlapReport(tuple(out))


@dataclass(frozen=True)
class FanRegion:
    """Wedge or diamond at base vertex ``index`` (0-based), as convex pieces."""

    kind: str  # "V" or "D"
    index: int
    apex: np.ndarray
    a_left: np.ndarray  # developed apex of B_{i-1}
    a_right: np.ndarray  # developed apex of B_i
    opening: float  # counterclockwise angle from a_left to a_right at the apex
    pieces: tuple[ConvexRegion, ...] = field(repr=False)

    @property
    def name(self) -> str:
        return f"{self.kind}_{self.index + 1}"

    @property
    def region(self) -> ConvexRegion:
        if len(self.pieces) != 1:
            raise GeometryError(f"{self.name} is not convex (opening {math.degrees(self.opening):.3f} deg)")
        return self.pieces[0]

    @property
    def halfplanes(self) -> tuple[HalfPlane, ...]:
        return self.region.halfplanes

    def boundary_rays(self) -> tuple[Ray2, Ray2]:
        """For V: rays from the apex; for D: the perpendicular rays at a_left, a_right."""
        if self.kind == "V":
            return Ray2.through(self.apex, self.a_left), Ray2.through(self.apex, self.a_right)
        d1 = self.a_left - self.apex
        d2 = self.a_right - self.apex
        return (Ray2(tuple(self.a_left), (-d1[1], d1[0])), Ray2(tuple(self.a_right), (d2[1], -d2[0])))

    def contains(self, pt, eps: float = 1e-9) -> bool:
        return any(r.contains(pt, eps) for r in self.pieces)


def _sector(apex, d1, d2) -> ConvexRegion:
    """Closed sector counterclockwise from direction d1 to d2 (opening below pi)."""
    return ConvexRegion((HalfPlane.left_of(apex, apex + d1), HalfPlane.left_of(apex + d2, apex)))


def _fan_context(band: Band, i: int, b_placed=None):
    p = band.prismatoid
    n = band.n
    i %= n
    b_placed = b_placed or place_b_triangles(band)
    left = b_placed[f"B{(i - 1) % n + 1}"]
    right = b_placed[f"B{i + 1}"]
    apex = p.base2[i].copy()
    return apex, left.coords[2].copy(), right.coords[2].copy()


def _opening(apex, aj, ak) -> float:
    d1, d2 = aj - apex, ak - apex
    ang = math.atan2(d1[0] * d2[1] - d1[1] * d2[0], float(np.dot(d1, d2)))
    return ang % (2 * math.pi)


def wedge(band: Band, i: int, b_placed=None, eps: float = 1e-12) -> FanRegion:
    """Wedge ``V_i`` at base vertex ``i`` (0-based)."""
    apex, aj, ak = _fan_context(band, i, b_placed)
    gap = _opening(apex, aj, ak)
    if abs(gap - math.pi) <= eps or gap <= eps:
        raise GeometryError("degenerate wedge")
    d1, d2 = aj - apex, ak - apex
    if gap < math.pi:
        pieces = (_sector(apex, d1, d2),)
    else:
        half = gap / 2
        c, s = math.cos(half), math.sin(half)
        mid = np.array([c * d1[0] - s * d1[1], s * d1[0] + c * d1[1]])
        pieces = (_sector(apex, d1, mid), _sector(apex, mid, d2))
    return FanRegion("V", i % band.n, apex, aj, ak, gap, pieces)


def diamond(band: Band, i: int, b_placed=None, eps: float = 1e-12) -> FanRegion:
    """Diamond ``D_i`` at base vertex ``i`` (0-based)."""
    V = wedge(band, i, b_placed, eps)
    cut = (HalfPlane.behind(V.a_left, V.a_left - V.apex), HalfPlane.behind(V.a_right, V.a_right - V.apex))
    pieces = tuple(ConvexRegion(piece.halfplanes + cut) for piece in V.pieces)
    return FanRegion("D", V.index, V.apex, V.a_left, V.a_right, V.opening, pieces)


def _as_pieces(r) -> tuple[ConvexRegion, ...]:
    if isinstance(r, FanRegion):
        return r.pieces
    if isinstance(r, ConvexRegion):
        return (r,)
    if isinstance(r, PlacedFace):
        return (ConvexRegion(tuple(edge_halfplanes(r.coords)), r.name),)
    return (ConvexRegion(tuple(edge_halfplanes(r))),)


def regions_intersect(r1, r2, eps: float = 1e-9) -> RegionIntersection:
    """``region_intersects`` lifted to regions made of several convex pieces."""
    best = None
    for p1 in _as_pieces(r1):
        for p2 in _as_pieces(r2):
            res = region_intersects(p1, p2, eps)
            if best is None or res.depth > best.depth:
                best = res
    return best


def _is_seam(x, n, piece, pieces, eps: float) -> bool:
    """Whether the line of ``piece`` at ``x`` with outward normal ``n`` is an internal cut."""
    step = 1e-7 * (1.0 + float(np.abs(x).max()))
    y = x + step * n
    return any(q is not piece and q.contains(y, eps) for q in pieces)


def penetration_angle(r1, r2, eps: float = 1e-9) -> float | None:
    """Smallest opening angle at a point where boundaries of r1 and r2 cross.

    Only crossings lying on the boundary of the common region count, and the
    angle is measured inside that common region.  Lines that merely split a
    wide region into convex pieces are not boundary.  None if the boundaries
    do not cross there.
    """
    q1, q2 = _as_pieces(r1), _as_pieces(r2)
    best = None
    for p1 in q1:
        for p2 in q2:
            hs = p1.halfplanes + p2.halfplanes
            for h1 in p1.halfplanes:
                for h2 in p2.halfplanes:
                    n1 = np.array([h1.a, h1.b]) / math.hypot(h1.a, h1.b)
                    n2 = np.array([h2.a, h2.b]) / math.hypot(h2.a, h2.b)
                    M = np.array([[h1.a, h1.b], [h2.a, h2.b]])
                    if abs(np.linalg.det(M)) < 1e-15 * (1 + np.abs(M).max() ** 2):
                        continue
                    x = np.linalg.solve(M, [h1.c, h2.c])
                    if not all(h.signed_distance(x) <= eps for h in hs):
                        continue
                    if _is_seam(x, n1, p1, q1, eps) or _is_seam(x, n2, p2, q2, eps):
                        continue
                    cross = abs(n1[0] * n2[1] - n1[1] * n2[0])
                    ang = math.atan2(cross, -float(np.dot(n1, n2)))
                    best = ang if best is None else min(best, ang)
    return best


def polygon_in_region(poly, region, rtol: float = 1e-9) -> bool:
    """Whether a convex polygon lies inside a (possibly multi-piece) region."""
    P = ensure_ccw(poly)
    total = abs(polygon_area(P))
    inside = sum(abs(polygon_area(clip_polygon(P, piece.halfplanes))) for piece in _as_pieces(region))
    return inside >= total * (1 - rtol)


@dataclass(frozen=True)
class CertificateResult:
    holds: bool
    witness: tuple[str, str] | None = None
    point: np.ndarray | None = None
    depth: float = 0.0
    penetration_angle: float | None = None

    def __str__(self) -> str:
        if self.holds:
            return "holds"
        return f"fails ({self.witness[0]}, {self.witness[1]})"


def orourke_certificate(p: Prismatoid | Band, eps: float = 1e-9) -> CertificateResult:
    """Check that every wedge avoids all B-triangles and all other diamonds.

    Returns the first failure in the order i = 1..n, B-triangles before
    diamonds.
    """
    band = p if isinstance(p, Band) else build_band(p)
    placed = place_b_triangles(band)
    n = band.n
    V = [wedge(band, i, placed) for i in range(n)]
    D = [diamond(band, i, placed) for i in range(n)]
    for i in range(n):
        others = [(f"B_{j + 1}", placed[f"B{j + 1}"]) for j in range(n)]
        others += [(D[j].name, D[j]) for j in range(n) if j != i]
        for name, other in others:
            res = regions_intersect(V[i], other, eps)
            if res.overlapping:
                return CertificateResult(
                    False, (V[i].name, name), res.witness, res.depth, penetration_angle(V[i], other, eps)
                )
    return CertificateResult(True)


@dataclass(frozen=True)
class SContainment:
    contained: bool
    violation: str | None = None


def _is_rectangle(base: np.ndarray, tol: float = 1e-9) -> bool:
    if len(base) != 4:
        return False
    for k in range(4):
        u = base[k - 1] - base[k]
        w = base[(k + 1) % 4] - base[k]
        if abs(float(np.dot(u, w))) > tol * float(np.linalg.norm(u) * np.linalg.norm(w)):
            return False
    return True


def rectangle_S_containment(p: Prismatoid | Band, i: int) -> SContainment:
    """Verify, for a rectangular base, that ``D_{i+2}`` stays in the corner region at ``b_i``.

    The corner region S is bounded by rays b_i b_{i+1} and b_i b_{i-1}.  Checks
    in order: the two segments bounding ``D_{i+2}``, its two perpendicular
    rays, and that ``V_i`` meets S only at ``b_i``.  Indices are 0-based;
    violation strings use 1-based labels.
    """
    band = p if isinstance(p, Band) else build_band(p)
    base = band.prismatoid.base2
    if not _is_rectangle(base):
        raise GeometryError("base not rectangle")
    n = 4
    i %= n
    c = (i + 2) % n
    b = base[i]
    S = ConvexRegion((HalfPlane.left_of(b, base[(i + 1) % n]), HalfPlane.left_of(base[(i - 1) % n], b)))
    placed = place_b_triangles(band)
    D = diamond(band, c, placed)
    V = wedge(band, i, placed)
    tag = f"b{c + 1}"
    # a_j: apex of B_{c-1}; a_k: apex of B_c
    for name, pt in ((f"segment {tag} a_k", D.a_right), (f"segment {tag} a_j", D.a_left)):
        if not S.contains(pt):
            return SContainment(False, name)
    ray_j, ray_k = D.boundary_rays()
    for name, ray in (("ray d1", ray_k), ("ray d2", ray_j)):
        if not (S.contains(ray.origin) and S.contains_direction(ray.direction)):
            return SContainment(False, name)
    # two cones with a common apex meet only there iff neither holds a boundary ray of the other
    for ray in V.boundary_rays():
        if S.contains_direction(ray.direction):
            return SContainment(False, f"V_{i + 1}")
    for d in (base[(i + 1) % n] - b, base[(i - 1) % n] - b):
        if V.contains(b + d / np.linalg.norm(d), eps=1e-12):
            return SContainment(False, f"V_{i + 1}")
    return SContainment(True)
