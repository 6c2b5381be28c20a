"""Bundled fixtures and random instance generators for sweeps."""

from __future__ import annotations

import json
import math
from importlib import resources

import numpy as np

from .geometry import GeometryError, TolerancePolicy, DEFAULT_POLICY
from .prismatoid import Prismatoid, build_band, is_nonobtuse_sides, validate
from .tall import tall_report

FIXTURES = ("pc", "pcyc", "square_antiprismoid", "tall_square")


def parse_document(doc: dict, policy: TolerancePolicy = DEFAULT_POLICY) -> Prismatoid:
    """Prismatoid from a JSON document.

    Points are either ``[x, y]`` pairs with ``zTop``/``zBase`` or full
    ``[x, y, z]`` triples.
    """
    def lift(pts, key):
        out = []
        for q in pts:
            if len(q) == 3:
                out.append([float(c) for c in q])
            elif len(q) == 2:
                if key not in doc:
                    raise GeometryError(f"2D points need {key}")
                out.append([float(q[0]), float(q[1]), float(doc[key])])
            else:
                raise GeometryError("points must have 2 or 3 coordinates")
        return out

    try:
        top, base = doc["top"], doc["base"]
    except KeyError as e:
        raise GeometryError(f"missing field {e.args[0]!r}") from None
    return validate(lift(top, "zTop"), lift(base, "zBase"), policy, name=doc.get("name", ""))


def to_document(p: Prismatoid, source: str = "") -> dict:
    return {
        "name": p.name,
        "source": source,
        "zBase": float(p.base[0, 2]),
        "base": p.base2.tolist(),
        "zTop": float(p.top[0, 2]),
        "top": p.top2.tolist(),
    }


def load_fixture(name: str, policy: TolerancePolicy = DEFAULT_POLICY) -> Prismatoid:
    text = resources.files("prismunfold").joinpath("data", f"{name}.json").read_text()
    return parse_document(json.loads(text), policy)


def from_xy(top, base, z_top: float, z_base: float = 0.0, name: str = "") -> Prismatoid:
    return validate([[x, y, z_top] for x, y in top], [[x, y, z_base] for x, y in base], name=name)


def random_convex_polygon(rng: np.random.Generator, k: int, rx: float = 1.0, ry: float = 1.0,
                          jitter: float = 0.3) -> np.ndarray:
    """``k`` points on a jittered ellipse, counterclockwise and strictly convex."""
    while True:
        ang = np.sort(rng.uniform(0, 2 * math.pi, k))
        if np.min(np.diff(np.append(ang, ang[0] + 2 * math.pi))) < 0.15:
            continue
        rad = 1 + rng.uniform(-jitter, jitter, k)
        P = np.stack([rx * rad * np.cos(ang), ry * rad * np.sin(ang)], axis=1)
        e1 = P - np.roll(P, 1, axis=0)
        e2 = np.roll(P, -1, axis=0) - P
        if np.all(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0] > 1e-3):
            return P


def random_rectangle_prismatoid(rng: np.random.Generator, max_tries: int = 10000) -> Prismatoid:
    """Rectangle base with every side face nonobtuse, by rejection sampling.

    The top may overhang the base: a fan of two or more nonobtuse
    A-triangles at one base vertex needs that vertex behind the top edges.
    """
    for _ in range(max_tries):
        w = rng.uniform(1.0, 2.5)
        h = 1.0
        base = [(-w, -h), (w, -h), (w, h), (-w, h)]
        m = int(rng.integers(3, 7))
        s = rng.uniform(0.5, 1.6)
        top = random_convex_polygon(rng, m, s * w, s * h, jitter=0.25) + rng.uniform(-0.2, 0.2, 2)
        z = rng.uniform(0.5 * w, 3.0)
        try:
            p = from_xy(top, base, z, name="random-rectangle")
            band = build_band(p)
        except GeometryError:
            continue
        if is_nonobtuse_sides(band)[0]:
            return p
    raise RuntimeError("rejection sampling found no nonobtuse instance")


def random_tall_prismatoid(rng: np.random.Generator, factor: float = 1.05) -> Prismatoid:
    """Random convex base and top with z set to ``factor`` times the height bound."""
    while True:
        n = int(rng.integers(3, 7))
        m = int(rng.integers(3, 7))
        base = random_convex_polygon(rng, n, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0))
        top = random_convex_polygon(rng, m, rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)) + rng.uniform(-1, 1, 2)
        try:
            p = from_xy(top, base, 1.0, name="random-tall")
            bound = tall_report(p).bound
            p = from_xy(top, base, factor * bound, name="random-tall")
            build_band(p)
        except GeometryError:
            continue
        return p
