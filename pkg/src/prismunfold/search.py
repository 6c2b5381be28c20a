"""Feasible-path descent for quadrilateral-base certificate counterexamples.

Starting from a prismatoid whose wedge/diamond certificate fails, move the
vertex coordinates to make the base cyclic while keeping every side face
nonobtuse and the certificate failing.  Moves that break either property are
rejected and the step is halved; near-active constraints are projected out
of the descent direction so the path slides along them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import nnls

from .geometry import GeometryError, angle_at
from .petal import place_b_triangles
from .prismatoid import Band, Prismatoid, build_band, face_angles, is_nonobtuse_sides, validate
from .regions import diamond, orourke_certificate, penetration_angle, wedge

__all__ = ["SearchConfig", "SearchResult", "SearchError", "objective_cyclic", "search"]

MIN_STEP = 1e-14
FD_STEP = 1e-6


class SearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    seed: int
    step_size: float = 1e-2
    shrink_factor: float = 0.5
    max_iters: int = 10000
    constraint_eps: float = 1e-9
    objective: str = "cyclic"  # "cyclic" or "custom"
    symmetric: bool = False
    target: float = 1e-6
    active_margin: float = 2e-3
    custom_objective: Callable[[Prismatoid], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if not 0 < self.shrink_factor < 1:
            raise ValueError("shrink_factor must lie in (0, 1)")
        if self.objective not in ("cyclic", "custom"):
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.objective == "custom" and self.custom_objective is None:
            raise ValueError("custom objective needs custom_objective")


@dataclass(frozen=True)
class SearchResult:
    prismatoid: Prismatoid
    objective_value: float
    constraints_satisfied: bool
    certificate_fails: bool
    iterations: int
    trace: list[tuple[int, float]]
    witness: tuple[str, str] | None = None
    penetration_angle: float | None = None

    def as_dict(self) -> dict:
        return {
            "objectiveValue": self.objective_value,
            "constraintsSatisfied": self.constraints_satisfied,
            "certificateFails": self.certificate_fails,
            "iterations": self.iterations,
            "witness": list(self.witness) if self.witness else None,
            "penetrationAngleDeg": None if self.penetration_angle is None else math.degrees(self.penetration_angle),
            "trace": [[k, v] for k, v in self.trace],
        }


def objective_cyclic(p: Prismatoid) -> float:
    """|angle b1 b2 b3 - pi/2| in radians."""
    if p.n != 4:
        raise GeometryError("base not quadrilateral")
    b = p.base2
    return abs(angle_at(b[1], b[0], b[2]) - math.pi / 2)


# parameterizations


class _Full:
    """All planar coordinates of both polygons; the height is held fixed.

    Objective and constraints are invariant under scaling, so one coordinate
    is pinned to remove that flat direction.
    """

    def __init__(self, p: Prismatoid):
        self.m, self.n = p.m, p.n
        self.name = p.name
        self.z_base = float(p.base[0, 2])
        self.z = p.z

    def encode(self, p: Prismatoid) -> np.ndarray:
        return np.concatenate([p.base2.ravel(), p.top2.ravel()])

    def decode(self, x: np.ndarray) -> Prismatoid:
        n2 = 2 * self.n
        base = x[:n2].reshape(self.n, 2)
        top = x[n2:].reshape(self.m, 2)
        return _lift(top, base, self.z_base, self.z_base + self.z, self.name)


class _Mirror:
    """Instances symmetric across y = 0: b1, b3, a1 on the axis; b2/b4 and a2/a3 mirrored.

    Variables: b1x, b2y, b3x, a1x, a2x, a2y.  The x-coordinate shared by
    b2 and b4 and the height stay at their starting values.
    """

    def __init__(self, p: Prismatoid, tol: float = 1e-9):
        b, a = p.base2, p.top2
        ok = (
            p.n == 4
            and p.m == 3
            and abs(b[0, 1]) <= tol
            and abs(b[2, 1]) <= tol
            and abs(a[0, 1]) <= tol
            and np.allclose(b[1], b[3] * [1, -1], atol=tol)
            and np.allclose(a[1], a[2] * [1, -1], atol=tol)
        )
        if not ok:
            raise SearchError("start violates preconditions: not in the mirror-symmetric family")
        self.b2x = float(b[1, 0])
        self.z = p.z
        self.name = p.name
        self.z_base = float(p.base[0, 2])

    def encode(self, p: Prismatoid) -> np.ndarray:
        b, a = p.base2, p.top2
        return np.array([b[0, 0], b[1, 1], b[2, 0], a[0, 0], a[1, 0], a[1, 1]])

    def decode(self, x: np.ndarray) -> Prismatoid:
        b1x, b2y, b3x, a1x, a2x, a2y = x
        base = [(b1x, 0.0), (self.b2x, b2y), (b3x, 0.0), (self.b2x, -b2y)]
        top = [(a1x, 0.0), (a2x, a2y), (a2x, -a2y)]
        return _lift(top, base, self.z_base, self.z_base + self.z, self.name)


def _lift(top, base, z_base, z_top, name) -> Prismatoid:
    return validate([[u, v, z_top] for u, v in top], [[u, v, z_base] for u, v in base], name=name)


# evaluation


@dataclass
class _State:
    x: np.ndarray
    p: Prismatoid
    band: Band
    f: float
    witness: tuple[str, str]


def _region_pair(band: Band, witness: tuple[str, str]):
    placed = place_b_triangles(band)
    i = int(witness[0].split("_")[1]) - 1
    kind, j = witness[1].split("_")
    j = int(j) - 1
    other = placed[f"B{j + 1}"] if kind == "B" else diamond(band, j, placed)
    return wedge(band, i, placed), other


def _constraints(band: Band, witness: tuple[str, str]) -> dict:
    """Constraint values g <= 0: face angles minus a right angle, and minus the crossing angle."""
    out = {}
    for name, angs in face_angles(band).items():
        for k, a in enumerate(angs):
            out[(name, k)] = a - math.pi / 2
    try:
        phi = penetration_angle(*_region_pair(band, witness))
    except GeometryError:
        phi = None
    out["cert"] = -(phi if phi is not None else 0.0)
    return out


def _feasible(param, x: np.ndarray, cfg: SearchConfig, objective) -> _State | None:
    try:
        p = param.decode(x)
        band = build_band(p)
    except GeometryError:
        return None
    if not is_nonobtuse_sides(band, cfg.constraint_eps)[0]:
        return None
    try:
        cert = orourke_certificate(band)
    except GeometryError:
        return None
    if cert.holds:
        return None
    return _State(x, p, band, objective(p), cert.witness)


def _fd_gradient(fun, x: np.ndarray) -> np.ndarray:
    g = np.zeros_like(x)
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = FD_STEP
        g[k] = (fun(x + e) - fun(x - e)) / (2 * FD_STEP)
    return g


def _fd_jacobian(param, x: np.ndarray, keys: list, witness) -> np.ndarray:
    J = np.zeros((len(keys), len(x)))
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = FD_STEP
        try:
            cp = _constraints(build_band(param.decode(x + e)), witness)
            cm = _constraints(build_band(param.decode(x - e)), witness)
        except GeometryError:
            continue
        for r, key in enumerate(keys):
            if key in cp and key in cm:
                J[r, k] = (cp[key] - cm[key]) / (2 * FD_STEP)
    return J


def _direction(g: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Steepest descent direction projected onto {d : J d <= 0}, via the NNLS dual."""
    if len(J) == 0:
        return -g
    lam, _ = nnls(J.T, -g)
    return -(g + J.T @ lam)


def search(start: Prismatoid, cfg: SearchConfig) -> SearchResult:
    """Projected, feasible-path descent from ``start``.

    Raises SearchError("start violates preconditions") unless the start has a
    quadrilateral base, nonobtuse side faces and a failing certificate, and
    SearchError("no progress") if the step underflows before any improvement.
    """
    if cfg.objective == "cyclic":
        if start.n != 4:
            raise SearchError("start violates preconditions: base not quadrilateral")
        objective = objective_cyclic
    else:
        objective = cfg.custom_objective
    param = _Mirror(start) if cfg.symmetric else _Full(start)
    rng = np.random.default_rng(cfg.seed)

    state = _feasible(param, param.encode(start), cfg, objective)
    if state is None:
        raise SearchError("start violates preconditions")
    trace = [(0, state.f)]
    step = cfg.step_size
    improved = False
    it = 0

    def fobj(y):
        try:
            return objective(param.decode(y))
        except GeometryError:
            return math.inf

    while it < cfg.max_iters and state.f > cfg.target:
        it += 1
        g = _fd_gradient(fobj, state.x)
        cons = _constraints(state.band, state.witness)
        keys = [k for k, v in cons.items() if v > -cfg.active_margin]
        d = _direction(g, _fd_jacobian(param, state.x, keys, state.witness))
        norm = float(np.linalg.norm(d))
        if norm <= 1e-12 * (1 + float(np.linalg.norm(g))):
            # stationary on the active set: try a random descent direction
            d = rng.standard_normal(len(g))
            if g @ g > 0:
                d -= max(0.0, float(d @ g)) / float(g @ g) * g
            norm = float(np.linalg.norm(d))
        d /= norm
        while True:
            nxt = _feasible(param, state.x + step * d, cfg, objective)
            if nxt is not None and nxt.f < state.f:
                state = nxt
                improved = True
                trace.append((it, state.f))
                step = min(cfg.step_size, step / cfg.shrink_factor)
                break
            step *= cfg.shrink_factor
            if step < MIN_STEP:
                break
        if step < MIN_STEP:
            if not improved:
                raise SearchError("no progress")
            break

    V, other = _region_pair(state.band, state.witness)
    return SearchResult(
        prismatoid=state.p,
        objective_value=state.f,
        constraints_satisfied=is_nonobtuse_sides(state.band, cfg.constraint_eps)[0],
        certificate_fails=not orourke_certificate(state.band).holds,
        iterations=it,
        trace=trace,
        witness=state.witness,
        penetration_angle=penetration_angle(V, other),
    )
