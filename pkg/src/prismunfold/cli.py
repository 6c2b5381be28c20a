"""Command line interface.

Exit codes: 0 for a positive verdict, 1 for a negative one, 2 for invalid
input.  Reports go to stdout as JSON; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .geometry import GeometryError
from .instances import parse_document, to_document
from .petal import count_choices, develop, enumerate_choices, parse_choice
from .prismatoid import build_band, face_angles, is_nonobtuse_sides, max_face_angle
from .regions import check_overlap, diamond, orourke_certificate, wedge
from .search import SearchConfig, SearchError, search
from .svg import emit_svg
from .tall import all_lemmas, step3_check, tall_report

EXIT_OK, EXIT_NEGATIVE, EXIT_INVALID = 0, 1, 2


def _load(path: str):
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise GeometryError(f"cannot read {path}: {e}") from None
    return parse_document(doc)


def _report(command: str, p, verdicts: dict, t0: float, **extra) -> dict:
    out = {"command": command, "instance": p.name, "verdicts": verdicts}
    out.update(extra)
    out["timings"] = {"seconds": round(time.perf_counter() - t0, 6)}
    return out


def _emit(report: dict) -> None:
    json.dump(report, sys.stdout, indent=2, default=_jsonable)
    sys.stdout.write("\n")


def _jsonable(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _region_doc(r) -> dict:
    return {
        "name": r.name,
        "apex": r.apex.tolist(),
        "aLeft": r.a_left.tolist(),
        "aRight": r.a_right.tolist(),
        "openingDeg": math.degrees(r.opening),
        "pieces": [[[h.a, h.b, h.c] for h in piece.halfplanes] for piece in r.pieces],
    }


def _overlap_job(args):
    doc, spec = args
    band = build_band(parse_document(doc))
    rep = check_overlap(develop(band, parse_choice(spec)))
    return spec, [list(w.faces) for w in rep.witnesses]


# subcommands


def cmd_validate(a) -> int:
    t0 = time.perf_counter()
    p = _load(a.file)
    band = build_band(p)
    ok, bad = is_nonobtuse_sides(band)
    _emit(_report("validate", p, {"valid": True, "nonobtuse": ok}, t0,
                  counts={"m": p.m, "n": p.n}, z=p.z, obtuse=[list(b) for b in bad]))
    return EXIT_OK


def cmd_band(a) -> int:
    t0 = time.perf_counter()
    p = _load(a.file)
    band = build_band(p)
    ok, _ = is_nonobtuse_sides(band)
    faces = [{"name": f.name, "vertices": list(f.vertices),
              "anglesDeg": [math.degrees(x) for x in face_angles(band)[f.name]]} for f in band.faces]
    _emit(_report("band", p, {"valid": True, "nonobtuse": ok}, t0,
                  counts={"B": band.n, "A": band.m, "fanSizes": list(band.fan_sizes)},
                  maxAngleDeg=math.degrees(max_face_angle(band)), faces=faces))
    return EXIT_OK


def cmd_enumerate(a) -> int:
    p = _load(a.file)
    band = build_band(p)
    if a.list:
        for c in enumerate_choices(band):
            print(c)
    else:
        print(count_choices(band))
    return EXIT_OK


def cmd_unfold(a) -> int:
    t0 = time.perf_counter()
    p = _load(a.file)
    band = build_band(p)
    if a.choice:
        specs = [str(parse_choice(a.choice))]
        parse_choice(a.choice).check(band)
    else:
        specs = [str(c) for c in enumerate_choices(band)]
    if a.workers > 1:
        doc = to_document(p)
        with ProcessPoolExecutor(a.workers) as pool:
            results = list(pool.map(_overlap_job, [(doc, s) for s in specs]))
    else:
        results = []
        for s in specs:
            rep = check_overlap(develop(band, parse_choice(s)))
            results.append((s, [list(w.faces) for w in rep.witnesses]))
    bad = [{"choice": s, "pairs": w} for s, w in results if w]
    _emit(_report("unfold", p, {"overlaps": bool(bad)}, t0,
                  counts={"layouts": len(results), "overlapping": len(bad)}, witnesses=bad))
    return EXIT_NEGATIVE if bad else EXIT_OK


def cmd_check(a) -> int:
    t0 = time.perf_counter()
    p = _load(a.file)
    band = build_band(p)
    nonob, _ = is_nonobtuse_sides(band)
    cert = orourke_certificate(band)
    tall = tall_report(p)
    bad = []
    for c in enumerate_choices(band):
        rep = check_overlap(develop(band, c))
        if rep.overlapping:
            bad.append({"choice": str(c), "pairs": [list(w.faces) for w in rep.witnesses]})
    verdicts = {"valid": True, "nonobtuse": nonob, "certificate": cert.holds,
                "tall": tall.is_tall, "overlaps": bool(bad)}
    _emit(_report("check", p, verdicts, t0, counts={"layouts": count_choices(band), "overlapping": len(bad)},
                  witnesses={"certificate": list(cert.witness) if cert.witness else None, "overlaps": bad}))
    return EXIT_NEGATIVE if bad else EXIT_OK


def cmd_regions(a) -> int:
    t0 = time.perf_counter()
    p = _load(a.file)
    band = build_band(p)
    if not 1 <= a.i <= band.n:
        raise GeometryError(f"--i must lie in 1..{band.n}")
    k = a.i - 1
    _emit(_report("regions", p, {"valid": True}, t0,
                  regions=[_region_doc(wedge(band, k)), _region_doc(diamond(band, k))]))
    return EXIT_OK


def cmd_certificate(a) -> int:
    t0 = time.perf_counter()
    p = _load(a.file)
    res = orourke_certificate(build_band(p))
    extra = {}
    if not res.holds:
        extra = {"witness": list(res.witness), "point": res.point, "depth": res.depth,
                 "penetrationAngleDeg": None if res.penetration_angle is None else math.degrees(res.penetration_angle)}
        print(f"certificate fails: ({res.witness[0]}, {res.witness[1]})", file=sys.stderr)
    _emit(_report("certificate", p, {"certificate": res.holds}, t0, **extra))
    return EXIT_OK if res.holds else EXIT_NEGATIVE


def cmd_tall(a) -> int:
    t0 = time.perf_counter()
    p = _load(a.file)
    r = tall_report(p)
    extra = {"report": r.as_dict()}
    ok = r.is_tall
    if a.lemmas:
        band = build_band(p)
        lem = all_lemmas(band, r)
        s3 = [step3_check(band, c, r) for c in enumerate_choices(band)]
        doc = {k: [{"where": x.where, "status": x.status, "slack": x.slack} for x in v] for k, v in lem.items()}
        doc["step3"] = [{"holds": s.holds, "dMin": s.d_min, "distance": s.distance, "escaped": list(s.escaped)} for s in s3]
        extra["lemmas"] = doc
        ok = ok and all(x.holds for v in lem.values() for x in v) and all(s.holds for s in s3)
    _emit(_report("tall", p, {"tall": r.is_tall, "lemmas": ok if a.lemmas else None}, t0, **extra))
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_search(a) -> int:
    t0 = time.perf_counter()
    p = _load(a.file)
    cfg = SearchConfig(seed=a.seed, step_size=a.step_size, max_iters=a.max_iters, symmetric=a.symmetric)
    try:
        res = search(p, cfg)
    except SearchError as e:
        if "no progress" not in str(e):
            raise
        print(f"search: {e}", file=sys.stderr)
        return EXIT_NEGATIVE
    doc = to_document(res.prismatoid, source=f"search from {p.name or a.file} seed {a.seed}")
    if a.out:
        Path(a.out).write_text(json.dumps(doc, indent=2) + "\n")
    ok = res.constraints_satisfied and res.certificate_fails
    _emit(_report("search", p, {"constraintsSatisfied": res.constraints_satisfied,
                                "certificateFails": res.certificate_fails}, t0,
                  result=res.as_dict(), document=doc))
    return EXIT_OK if ok else EXIT_NEGATIVE


def _viewport(text: str | None):
    if text is None:
        return None
    vals = [float(v) for v in text.split(",")]
    if len(vals) != 4 or vals[0] >= vals[2] or vals[1] >= vals[3]:
        raise GeometryError("viewport must be xmin,ymin,xmax,ymax")
    return tuple(vals)


def cmd_render(a) -> int:
    p = _load(a.file)
    band = build_band(p)
    items = []
    if a.choice or not a.regions:
        c = parse_choice(a.choice) if a.choice else next(enumerate_choices(band))
        items.extend(develop(band, c).faces)
    for spec in a.regions or []:
        kind, k = spec[0].upper(), int(spec[1:].lstrip("_")) - 1
        if kind not in "VD" or not 0 <= k < band.n:
            raise GeometryError(f"bad region {spec!r}")
        items.append(wedge(band, k) if kind == "V" else diamond(band, k))
    Path(a.svg).write_bytes(emit_svg(items, _viewport(a.viewport)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prismunfold", description="Petal unfoldings of prismatoids.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help="prismatoid JSON document")
        sp.set_defaults(func=fn)
        return sp

    add("validate", cmd_validate, "validate an instance")
    add("band", cmd_band, "report the lateral band")
    add("enumerate", cmd_enumerate, "count petal unfoldings").add_argument("--list", action="store_true")
    sp = add("unfold", cmd_unfold, "develop petal unfoldings and test for overlap")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--choice", help="fanSplit=k1,...,kn;topEdge=j")
    g.add_argument("--all", action="store_true")
    sp.add_argument("--workers", type=int, default=1)
    add("check", cmd_check, "all verdicts for an instance")
    add("regions", cmd_regions, "wedge and diamond at a base vertex").add_argument("--i", type=int, required=True)
    add("certificate", cmd_certificate, "wedge/diamond disjointness certificate")
    add("tall", cmd_tall, "height bound report").add_argument("--lemmas", action="store_true")
    sp = add("search", cmd_search, "descent towards a cyclic-base counterexample")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--objective", choices=["cyclic"], default="cyclic")
    sp.add_argument("--symmetric", action="store_true")
    sp.add_argument("--step-size", type=float, default=1e-2)
    sp.add_argument("--max-iters", type=int, default=10000)
    sp.add_argument("--out", help="write the result document here")
    sp = add("render", cmd_render, "draw a layout and/or regions as SVG")
    sp.add_argument("--svg", required=True)
    sp.add_argument("--choice")
    sp.add_argument("--regions", nargs="*", help="e.g. V2 D4")
    sp.add_argument("--viewport", help="xmin,ymin,xmax,ymax")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID
    try:
        return a.func(a)
    except (GeometryError, SearchError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
