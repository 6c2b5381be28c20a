"""Prismatoid model: validation of the two polygons and the lateral band."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geometry import DEFAULT_POLICY, GeometryError, TolerancePolicy, angle_at, orient2d, to_rational

__all__ = [
    "Prismatoid",
    "SideFace",
    "Band",
    "validate",
    "build_band",
    "face_angles",
    "max_face_angle",
    "is_nonobtuse_sides",
]


@dataclass(frozen=True)
class Prismatoid:
    """Top polygon ``a_1..a_m`` and base ``b_1..b_n``, both CCW from above."""

    top: np.ndarray
    base: np.ndarray
    name: str = ""
    policy: TolerancePolicy = field(default=DEFAULT_POLICY, compare=False)

    @property
    def m(self) -> int:
        return len(self.top)

    @property
    def n(self) -> int:
        return len(self.base)

    @property
    def z(self) -> float:
        return float(self.top[0, 2] - self.base[0, 2])

    @property
    def top2(self) -> np.ndarray:
        return self.top[:, :2]

    @property
    def base2(self) -> np.ndarray:
        return self.base[:, :2]

    def point(self, label: str) -> np.ndarray:
        idx = int(label[1:]) - 1
        return self.base[idx] if label[0] == "b" else self.top[idx]

    def transformed(self, f) -> "Prismatoid":
        """Apply ``f`` to the (k, 3) coordinate arrays and revalidate."""
        return validate(f(self.top), f(self.base), self.policy, name=self.name)

    def scaled(self, s: float) -> "Prismatoid":
        return self.transformed(lambda P: np.asarray(P) * s)


def _polygon_normal(P: np.ndarray) -> np.ndarray:
    # Newell's method
    nrm = np.zeros(3)
    for k in range(len(P)):
        cur, nxt = P[k], P[(k + 1) % len(P)]
        nrm += np.array([
            (cur[1] - nxt[1]) * (cur[2] + nxt[2]),
            (cur[2] - nxt[2]) * (cur[0] + nxt[0]),
            (cur[0] - nxt[0]) * (cur[1] + nxt[1]),
        ])
    return nrm


def _rotation_to_z(nrm: np.ndarray) -> np.ndarray:
    n = nrm / np.linalg.norm(nrm)
    zhat = np.array([0.0, 0.0, 1.0])
    v = np.cross(n, zhat)
    s, c = float(np.linalg.norm(v)), float(np.dot(n, zhat))
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx * ((1 - c) / s**2)


def _check_polygon(P2, which: str, policy: TolerancePolicy) -> int:
    """Checks a planar polygon and returns its orientation sign."""
    n = len(P2)
    gaps = np.abs(P2[:, None, :] - P2[None, :, :]).max(axis=2)
    np.fill_diagonal(gaps, np.inf)
    if gaps.min() <= policy.eps_predicate:
        raise GeometryError(f"repeated vertex in {which}")
    turns = {orient2d(P2[k - 1], P2[k], P2[(k + 1) % n], policy) for k in range(n)}
    if 0 in turns or len(turns) != 1:
        raise GeometryError(f"nonconvex polygon ({which})")
    # a star-shaped winding (e.g. a pentagram) turns one way but winds twice
    total = sum(
        math.atan2(
            (P2[k][0] - P2[k - 1][0]) * (P2[(k + 1) % n][1] - P2[k][1])
            - (P2[k][1] - P2[k - 1][1]) * (P2[(k + 1) % n][0] - P2[k][0]),
            (P2[k][0] - P2[k - 1][0]) * (P2[(k + 1) % n][0] - P2[k][0])
            + (P2[k][1] - P2[k - 1][1]) * (P2[(k + 1) % n][1] - P2[k][1]),
        )
        for k in range(n)
    )
    if abs(abs(total) - 2 * math.pi) > 1e-6:
        raise GeometryError(f"nonconvex polygon ({which})")
    return turns.pop()


def _ccw(P: np.ndarray, sign: int) -> np.ndarray:
    # keep the first vertex, reverse the rest
    return P if sign > 0 else np.vstack([P[:1], P[:0:-1]])


def validate(top, base, policy: TolerancePolicy = DEFAULT_POLICY, name: str = "") -> Prismatoid:
    """Build a :class:`Prismatoid`, normalizing orientation to CCW.

    Polygons in parallel planes that are not horizontal are moved by a rigid
    motion so that they lie in ``z = const`` planes with the top above.
    """
    top = np.array(top, dtype=float)
    base = np.array(base, dtype=float)
    if top.ndim != 2 or base.ndim != 2 or top.shape[1] != 3 or base.shape[1] != 3:
        raise GeometryError("expected lists of 3D points")
    if len(top) < 3 or len(base) < 3:
        raise GeometryError("fewer than 3 vertices")
    if not (np.all(np.isfinite(top)) and np.all(np.isfinite(base))):
        raise GeometryError("non-finite coordinate")

    scale = max(np.abs(top).max(), np.abs(base).max(), 1.0)
    flat = np.ptp(top[:, 2]) <= policy.eps_predicate * scale and np.ptp(base[:, 2]) <= policy.eps_predicate * scale
    if not flat:
        nb, nt = _polygon_normal(base), _polygon_normal(top)
        if np.linalg.norm(nb) < policy.eps_predicate or np.linalg.norm(nt) < policy.eps_predicate:
            raise GeometryError("degenerate polygon")
        if np.linalg.norm(np.cross(nb / np.linalg.norm(nb), nt / np.linalg.norm(nt))) > 1e-9:
            raise GeometryError("planes not parallel")
        Rm = _rotation_to_z(nb)
        top, base = top @ Rm.T, base @ Rm.T
        for P, which in ((top, "top"), (base, "base")):
            if np.ptp(P[:, 2]) > 1e-9 * scale:
                raise GeometryError(f"{which} polygon not planar")
        top[:, 2] = top[:, 2].mean()
        base[:, 2] = base[:, 2].mean()
    dz = float(top[0, 2] - base[0, 2])
    if abs(dz) <= policy.eps_predicate * scale:
        raise GeometryError("coplanar polygons")
    if dz < 0:
        # half turn about the x-axis puts the top above the base
        flip = np.diag([1.0, -1.0, -1.0])
        top, base = top @ flip, base @ flip

    sb = _check_polygon(base[:, :2], "base", policy)
    st = _check_polygon(top[:, :2], "top", policy)
    return Prismatoid(_ccw(top, st), _ccw(base, sb), name=name, policy=policy)


@dataclass(frozen=True)
class SideFace:
    kind: str  # "A" or "B"
    index: int  # edge index on its own polygon (0-based)
    apex: int  # vertex index on the other polygon (0-based)
    vertices: tuple[str, str, str]

    @property
    def name(self) -> str:
        return f"{self.kind}{self.index + 1}"


@dataclass(frozen=True)
class Band:
    """Cyclic lateral band of a prismatoid.

    ``b_apex[i]`` is the top vertex of B-triangle ``B_i`` (edge b_i b_{i+1});
    ``fans[i]`` lists the A-triangles with apex ``b_i`` in order from the
    ``B_{i-1}`` side to the ``B_i`` side.
    """

    prismatoid: Prismatoid
    faces: tuple[SideFace, ...]
    b_apex: tuple[int, ...]
    a_apex: tuple[int, ...]
    fans: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.b_apex)

    @property
    def m(self) -> int:
        return len(self.a_apex)

    def b_face(self, i: int) -> SideFace:
        i %= self.n
        return SideFace("B", i, self.b_apex[i], (f"b{i + 1}", f"b{(i + 1) % self.n + 1}", f"a{self.b_apex[i] + 1}"))

    def a_face(self, j: int) -> SideFace:
        j %= self.m
        return SideFace("A", j, self.a_apex[j], (f"a{j + 1}", f"a{(j + 1) % self.m + 1}", f"b{self.a_apex[j] + 1}"))

    def face(self, name: str) -> SideFace:
        idx = int(name[1:]) - 1
        return self.b_face(idx) if name[0] == "B" else self.a_face(idx)

    def coords(self, f: SideFace) -> np.ndarray:
        return np.array([self.prismatoid.point(v) for v in f.vertices])

    @property
    def fan_sizes(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.fans)


def _argmax_unique(values, exact: bool, eps: float) -> int:
    order = sorted(range(len(values)), key=lambda k: values[k], reverse=True)
    best, second = order[0], order[1]
    gap = values[best] - values[second]
    if (gap <= 0) if exact else (gap <= eps):
        raise GeometryError("non-simplicial side face")
    return best


def _outward_scores(P, Q, exact: bool):
    """For each edge of polygon P, dot of its outward normal with each vertex of Q."""
    k = len(P)
    scores = []
    for e in range(k):
        p, q = P[e], P[(e + 1) % k]
        nx, ny = q[1] - p[1], -(q[0] - p[0])
        scores.append([nx * v[0] + ny * v[1] for v in Q])
    return scores


def build_band(p: Prismatoid) -> Band:
    """Lateral faces of the hull by merging the two polygons' edge normals.

    The apex of ``B_i`` is the top vertex extreme in the outward normal of base
    edge ``b_i b_{i+1}``; likewise for A-triangles.  A tie means four coplanar
    vertices on a supporting plane.
    """
    exact = p.policy.exact
    conv = (lambda P: [[to_rational(c) for c in v] for v in P]) if exact else (lambda P: P.tolist())
    B, A = conv(p.base2), conv(p.top2)
    n, m = p.n, p.m
    scale = max(float(np.abs(p.base2).max()), float(np.abs(p.top2).max()), 1.0)
    eps = p.policy.eps_predicate * scale * scale
    b_apex = tuple(_argmax_unique(s, exact, eps) for s in _outward_scores(B, A, exact))
    a_apex = tuple(_argmax_unique(s, exact, eps) for s in _outward_scores(A, B, exact))

    fans = []
    total = 0
    for i in range(n):
        start, stop = b_apex[i - 1], b_apex[i]
        size = (stop - start) % m
        fan = tuple((start + t) % m for t in range(size))
        if any(a_apex[j] != i for j in fan):
            raise GeometryError("top/base face reconstruction failed")
        fans.append(fan)
        total += size
    if total != m:
        raise GeometryError("top/base face reconstruction failed")

    band = Band(p, (), b_apex, a_apex, tuple(fans))
    faces = []
    for i in range(n):
        faces.extend(band.a_face(j) for j in fans[i])
        faces.append(band.b_face(i))
    band = Band(p, tuple(faces), b_apex, a_apex, tuple(fans))
    for f in faces:
        c = band.coords(f)
        if np.linalg.norm(np.cross(c[1] - c[0], c[2] - c[0])) <= p.policy.eps_predicate * scale:
            raise GeometryError("degenerate side face")
    return band


def face_angles(band: Band) -> dict[str, tuple[float, float, float]]:
    """Angles of each side face at its three vertices (in ``vertices`` order)."""
    out = {}
    for f in band.faces:
        c = band.coords(f)
        out[f.name] = tuple(angle_at(c[k], c[(k + 1) % 3], c[(k + 2) % 3]) for k in range(3))
    return out


def max_face_angle(band: Band) -> float:
    return max(max(t) for t in face_angles(band).values())


def _nonobtuse_exact(band: Band, f: SideFace) -> list[int]:
    P = [[to_rational(x) for x in band.prismatoid.point(v)] for v in f.vertices]
    bad = []
    for k in range(3):
        u = [P[(k + 1) % 3][d] - P[k][d] for d in range(3)]
        w = [P[(k + 2) % 3][d] - P[k][d] for d in range(3)]
        if sum(x * y for x, y in zip(u, w)) < 0:
            bad.append(k)
    return bad


def is_nonobtuse_sides(band: Band, eps: float | None = None) -> tuple[bool, list[tuple[str, str, float]]]:
    """True iff every side-face angle is at most pi/2 + eps.

    Violations are ``(face name, vertex label, angle)``.  In exact mode with
    ``eps`` unset the test is the sign of a rational dot product.
    """
    exact = band.prismatoid.policy.exact and eps is None
    if eps is None:
        eps = 0.0 if band.prismatoid.policy.exact else 1e-9
    angles = face_angles(band)
    violations = []
    for f in band.faces:
        if exact:
            bad = _nonobtuse_exact(band, f)
        else:
            bad = [k for k in range(3) if angles[f.name][k] > math.pi / 2 + eps]
        violations.extend((f.name, f.vertices[k], angles[f.name][k]) for k in bad)
    return not violations, violations
