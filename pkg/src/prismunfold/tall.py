"""Height bound for tall prismatoids and the per-face inequalities behind it.

A prismatoid is *tall* when the plane separation z satisfies

    z >= (3*pi*P_A + 4*d_AB) / (2*Delta_B)

with P_A the top perimeter, Delta_B the smallest turn angle of the base and
d_AB the diameter of the base together with the top's vertical projection.
The three step checks evaluate, on a concrete instance, the angle and
distance inequalities that make every petal of a tall prismatoid stay in the
sector cut out by the exterior-angle bisectors of its base edge.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import ConvexRegion, HalfPlane, Ray2, angle_at
from .petal import Layout, PetalChoice, develop
from .prismatoid import Band, Prismatoid, build_band
from .regions import polygon_in_region

__all__ = [
    "TallReport",
    "LemmaCheck",
    "tall_report",
    "combined_hypothesis",
    "sector",
    "step1_check",
    "step2_check",
    "step3_check",
    "all_lemmas",
]


@dataclass(frozen=True)
class TallReport:
    z: float
    perimeter_top: float
    delta_b: float
    top_projection: np.ndarray
    d_ab: float
    bound: float
    ell: float

    @property
    def is_tall(self) -> bool:
        return self.z >= self.bound

    def as_dict(self) -> dict:
        return {
            "z": self.z,
            "P_A": self.perimeter_top,
            "Delta_B": self.delta_b,
            "Aproj": self.top_projection.tolist(),
            "d_AB": self.d_ab,
            "bound": self.bound,
            "ell": self.ell,
            "isTall": self.is_tall,
        }


def _interior_angles(P: np.ndarray) -> np.ndarray:
    n = len(P)
    return np.array([angle_at(P[k], P[k - 1], P[(k + 1) % n]) for k in range(n)])


def tall_report(p: Prismatoid) -> TallReport:
    top = p.top2
    perim = float(np.sum(np.linalg.norm(np.roll(top, -1, axis=0) - top, axis=1)))
    delta = math.pi - float(_interior_angles(p.base2).max())
    if delta < 1e-6:
        warnings.warn("base has a nearly straight angle; the height bound is huge", RuntimeWarning)
    pts = np.vstack([p.base2, top])
    d = max(float(np.linalg.norm(u - v)) for u, v in itertools.combinations(pts, 2))
    bound = (3 * math.pi * perim + 4 * d) / (2 * delta)
    ell = 4 * d / (3 * math.pi * perim + 4 * d)
    return TallReport(p.z, perim, delta, top.copy(), d, bound, ell)


def combined_hypothesis(r: TallReport, ell: float | None = None) -> float:
    """Height needed for both the step-1 and step-2 hypotheses at ``ell``."""
    ell = r.ell if ell is None else ell
    return max(2 * r.d_ab / (r.delta_b * ell), 3 * math.pi * r.perimeter_top / (2 * r.delta_b * (1 - ell)))


@dataclass(frozen=True)
class LemmaCheck:
    status: str  # "holds" | "fails" | "not-applicable"
    slack: float | None = None
    lhs: float | None = None
    rhs: float | None = None
    where: str = ""

    @property
    def holds(self) -> bool:
        return self.status == "holds"


def _applies(z: float, needed: float) -> bool:
    return z >= needed * (1 - 1e-12)


def step1_check(band: Band, i: int, end: int, ell: float, report: TallReport | None = None) -> LemmaCheck:
    """Angle of B-triangle ``B_i`` at its base vertex ``end`` (0 for b_i, 1 for b_{i+1}).

    Holds when the angle is at most pi/2 + (Delta_B/2)*ell; applicable once
    z >= 2*d_AB / (Delta_B*ell).
    """
    r = report or tall_report(band.prismatoid)
    where = f"B{i % band.n + 1}@{band.b_face(i).vertices[end]}"
    if not _applies(r.z, 2 * r.d_ab / (r.delta_b * ell)):
        return LemmaCheck("not-applicable", where=where)
    c = band.coords(band.b_face(i))
    lhs = angle_at(c[end], c[1 - end], c[2])
    rhs = math.pi / 2 + r.delta_b / 2 * ell
    return LemmaCheck("holds" if lhs <= rhs else "fails", rhs - lhs, lhs, rhs, where)


def _fan_angles(band: Band, i: int) -> list[tuple[float, float]]:
    """Per fan triangle at b_i: (angle at b_i, length of its top edge)."""
    out = []
    for j in band.fans[i % band.n]:
        c = band.coords(band.a_face(j))
        out.append((angle_at(c[2], c[0], c[1]), float(np.linalg.norm(c[1] - c[0]))))
    return out


def _chain_angle(band: Band, i: int, side: str, count: int | None) -> float:
    """Angle at b_i subtended by the fan triangles chained on one side, measured in the layout."""
    n = band.n
    i %= n
    r = len(band.fans[i])
    count = r if count is None else count
    if count == 0:
        return 0.0
    k = count if side == "left" else r - count
    splits = tuple(k if t == i else 0 for t in range(n))
    layout = develop(band, PetalChoice(splits, 0))
    bi = f"b{i + 1}"
    fan = band.fans[i]
    chain = fan[:count] if side == "left" else fan[r - count:]
    total = 0.0
    for j in chain:
        f = layout[f"A{j + 1}"]
        total += angle_at(f.point(bi), f.coords[0], f.coords[1])
    return total


def step2_check(
    band: Band, i: int, side: str, ell: float, report: TallReport | None = None, count: int | None = None
) -> tuple[LemmaCheck, list[LemmaCheck]]:
    """Fan angle at base vertex ``i`` on one side, plus the per-triangle arcsin bound.

    ``count`` chained triangles (default: the whole fan, the worst case) must
    subtend at most (Delta_B/3)*(1-ell), applicable once
    z >= 3*pi*P_A / (2*Delta_B*(1-ell)).  Each fan triangle's angle at b_i is
    also compared with (pi/2)*|a_j a_{j+1}|/z.
    """
    r = report or tall_report(band.prismatoid)
    where = f"b{i % band.n + 1}/{side}"
    per_edge = []
    for t, (ang, length) in enumerate(_fan_angles(band, i)):
        rhs = math.pi / 2 * length / r.z
        per_edge.append(LemmaCheck("holds" if ang <= rhs else "fails", rhs - ang, ang, rhs, f"{where}#{t}"))
    if not _applies(r.z, 3 * math.pi * r.perimeter_top / (2 * r.delta_b * (1 - ell))):
        return LemmaCheck("not-applicable", where=where), per_edge
    lhs = _chain_angle(band, i, side, count)
    rhs = r.delta_b / 3 * (1 - ell)
    return LemmaCheck("holds" if lhs <= rhs else "fails", rhs - lhs, lhs, rhs, where), per_edge


def _exterior_bisector(base: np.ndarray, k: int) -> np.ndarray:
    n = len(base)
    v = base[k]
    u1 = base[k - 1] - v
    u2 = base[(k + 1) % n] - v
    d = -(u1 / np.linalg.norm(u1) + u2 / np.linalg.norm(u2))
    return d / np.linalg.norm(d)


def _side_containing(h: HalfPlane, ref) -> HalfPlane:
    return h if h.signed_distance(ref) <= 0 else h.flipped()


def sector(p: Prismatoid, i: int) -> ConvexRegion:
    """Region outside base edge b_i b_{i+1} between the exterior bisectors at its ends."""
    base = p.base2
    n = len(base)
    b0, b1 = base[i % n], base[(i + 1) % n]
    m0, m1 = _exterior_bisector(base, i % n), _exterior_bisector(base, (i + 1) % n)
    h_edge = HalfPlane.left_of(b1, b0)
    h0 = _side_containing(HalfPlane.left_of(b0, b0 + m0), b1)
    h1 = _side_containing(HalfPlane.left_of(b1, b1 + m1), b0)
    return ConvexRegion((h_edge, h0, h1), f"S_{i % n + 1}")


def _top_attachment(band: Band, c: PetalChoice):
    """(fan vertex i, side, chain position) of the A-triangle carrying the top."""
    for i, fan in enumerate(band.fans):
        if c.top_edge in fan:
            t = fan.index(c.top_edge)
            return i, ("left" if t < c.fan_split[i] else "right"), t
    raise AssertionError("top edge not in any fan")


@dataclass(frozen=True)
class Step3Result:
    holds: bool
    d_min: float
    distance: float
    half_perimeter: float
    escaped: tuple[str, ...] = ()


def step3_check(band: Band, c: PetalChoice, report: TallReport | None = None, layout: Layout | None = None) -> Step3Result:
    """Distance from the top's attachment vertex to the bisector ray, and petal containment.

    ``d_min`` is |b_i a_j'| * sin(pi/2 + Delta_B/2 - angle(B-triangle at b_i)
    - fan angle up to a_j'), taken as |b_i a_j'| when the sine's argument
    exceeds pi/2 (the ray's origin is then the nearest point).  ``distance``
    is the measured distance to the actual bisector ray.  Every placed face
    must also lie in the sector of the B-triangle it hangs from.
    """
    p = band.prismatoid
    r = report or tall_report(p)
    layout = layout or develop(band, c)
    n = band.n
    i, side, _ = _top_attachment(band, c)
    bi = f"b{i + 1}"
    carrier_b = band.b_face(i - 1 if side == "left" else i)
    other = carrier_b.vertices[0] if side == "left" else carrier_b.vertices[1]
    Bf = layout[carrier_b.name]
    vb = Bf.point(bi)
    ang1 = angle_at(vb, Bf.point(other), Bf.coords[2])
    # the top hinge endpoint farther (in angle) from the B-triangle
    top = layout["top"]
    hinge = layout["top"].hinge
    cands = [top.point(h) for h in hinge]
    angs = [angle_at(vb, Bf.coords[2], q) for q in cands]
    far = int(np.argmax(angs))
    aj = cands[far]
    ang2 = angs[far]
    arg = math.pi / 2 + r.delta_b / 2 - ang1 - ang2
    length = float(np.linalg.norm(aj - vb))
    d_min = length * math.sin(arg) if arg <= math.pi / 2 else length
    M = Ray2(tuple(vb), tuple(_exterior_bisector(p.base2, i)))
    distance = M.distance_to(aj)

    escaped = []
    for f in layout.faces:
        petal = layout.petal_of(f.name)
        if petal is None:
            continue
        k = int(petal[1:]) - 1
        if not polygon_in_region(f.coords, sector(p, k)):
            escaped.append(f.name)
    half = r.perimeter_top / 2
    ok = d_min >= half and distance >= half and not escaped
    return Step3Result(ok, d_min, distance, half, tuple(escaped))


def all_lemmas(band: Band, report: TallReport | None = None) -> dict[str, list]:
    """Step 1 for every lateral edge of every B-triangle and step 2 for every fan side."""
    r = report or tall_report(band.prismatoid)
    s1 = [step1_check(band, i, end, r.ell, r) for i in range(band.n) for end in (0, 1)]
    s2, edges = [], []
    for i in range(band.n):
        for side in ("left", "right"):
            agg, per = step2_check(band, i, side, r.ell, r)
            s2.append(agg)
            if side == "left":
                edges.extend(per)
    return {"step1": s1, "step2": s2, "step2_edges": edges}
