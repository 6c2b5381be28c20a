"""Petal unfoldings of prismatoids: layouts, overlap checks, wedge/diamond
certificates, the tall-prismatoid height bound and a counterexample search."""

from .geometry import (
    DEFAULT_POLICY,
    EXACT_POLICY,
    ConvexRegion,
    GeometryError,
    HalfPlane,
    Ray2,
    RegionIntersection,
    TolerancePolicy,
    angle_at,
    develop_across_hinge,
    orient2d,
    region_intersects,
)
from .instances import FIXTURES, from_xy, load_fixture, parse_document, to_document
from .petal import (
    Layout,
    PetalChoice,
    PlacedFace,
    all_layouts,
    count_choices,
    develop,
    enumerate_choices,
    parse_choice,
    sample_choices,
)
from .prismatoid import Band, Prismatoid, SideFace, build_band, face_angles, is_nonobtuse_sides, validate
from .regions import (
    CertificateResult,
    FanRegion,
    OverlapReport,
    check_overlap,
    diamond,
    orourke_certificate,
    penetration_angle,
    rectangle_S_containment,
    regions_intersect,
    wedge,
)
from .search import SearchConfig, SearchError, SearchResult, objective_cyclic, search
from .svg import emit_svg
from .tall import TallReport, all_lemmas, sector, step1_check, step2_check, step3_check, tall_report

__version__ = "0.1.0"
