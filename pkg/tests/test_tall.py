import math
import warnings

import numpy as np
import pytest
from scipy.spatial.distance import pdist

from prismunfold import build_band, enumerate_choices, tall_report
from prismunfold.instances import from_xy, random_tall_prismatoid
from prismunfold.tall import all_lemmas, combined_hypothesis, sector, step1_check, step3_check


def oracle_bound(p):
    base, top = p.base2, p.top2
    n = len(base)
    interior = []
    for k in range(n):
        u, w = base[k - 1] - base[k], base[(k + 1) % n] - base[k]
        interior.append(math.acos(np.dot(u, w) / (np.linalg.norm(u) * np.linalg.norm(w))))
    delta = math.pi - max(interior)
    perim = sum(math.dist(top[k], top[(k + 1) % len(top)]) for k in range(len(top)))
    d = pdist(np.vstack([base, top])).max()
    return (3 * math.pi * perim + 4 * d) / (2 * delta)


@pytest.mark.parametrize("name", ["pc", "pcyc", "square_antiprismoid", "tall_square"])
def test_bound_matches_formula_oracle(fixtures, name):
    p = fixtures[name]
    assert tall_report(p).bound == pytest.approx(oracle_bound(p), rel=1e-12)


def test_pc_report(pc):
    r = tall_report(pc)
    assert not r.is_tall
    assert r.bound == pytest.approx(42.70, abs=0.01)
    assert r.d_ab == pytest.approx(6.95)
    d = r.as_dict()
    assert set(d) == {"z", "P_A", "Delta_B", "Aproj", "d_AB", "bound", "ell", "isTall"}


def test_ell_splits_the_bound(fixtures):
    # at the reported ell both hypotheses equal the bound
    for p in fixtures.values():
        r = tall_report(p)
        assert combined_hypothesis(r) == pytest.approx(r.bound, rel=1e-12)
        assert 0 < r.ell < 1


def test_tall_square_lemmas(bands, fixtures):
    p = fixtures["tall_square"]
    band = bands["tall_square"]
    r = tall_report(p)
    assert r.is_tall
    lem = all_lemmas(band, r)
    for group in lem.values():
        for chk in group:
            assert chk.holds and chk.slack >= 0, chk
    for c in enumerate_choices(band):
        s3 = step3_check(band, c, r)
        assert s3.holds and not s3.escaped


def test_lemmas_not_applicable_when_short(bands, fixtures):
    r = tall_report(fixtures["pc"])
    chk = step1_check(bands["pc"], 0, 0, r.ell, r)
    assert chk.status == "not-applicable"


def test_sector_shape(fixtures):
    p = fixtures["tall_square"]
    S = sector(p, 0)
    b0, b1 = p.base2[0], p.base2[1]
    out = (b0 + b1) / 2 + 5 * np.array([(b1 - b0)[1], -(b1 - b0)[0]])
    assert S.contains(out)
    assert not S.contains(p.base2.mean(axis=0))


def test_near_straight_angle_warns():
    base = [(-1, 0), (0, -1e-8), (1, 0), (0, 1)]
    p = from_xy([(-0.1, 0.3), (0.1, 0.3), (0, 0.5)], base, 1.0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        tall_report(p)
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_random_tall_instances_satisfy_lemmas():
    rng = np.random.default_rng(3)
    for _ in range(5):
        p = random_tall_prismatoid(rng)
        band = build_band(p)
        r = tall_report(p)
        assert r.is_tall
        for group in all_lemmas(band, r).values():
            assert all(chk.holds for chk in group)
