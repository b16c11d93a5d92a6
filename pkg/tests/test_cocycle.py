import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyptrig.cocycle import (
    IsometrySample,
    check_invariance,
    coboundary,
    coboundary_defect,
    coboundary_report,
    cocycle_value,
    dilation_words,
    equivariance_defect,
    invariance_defect,
    pushed_triangle,
    random_quadruples,
    straight_cocycle_value,
)
from hyptrig.errors import NotInvariant
from hyptrig.functions import catalog_functions, constant, dilation_invariant, gaussian_bump, odd_in_x
from hyptrig.hyperbolic_core import INFINITY, GeodesicTriangle, MobiusTransform, Point, triangle_angles
from hyptrig.quadrature import QuadratureConfig

TOL = 1e-9
CFG = QuadratureConfig(tol=TOL)
FUNCS = catalog_functions()

boundary = st.one_of(st.floats(-50, 50), st.just(math.inf))


def _separated(t, gap=1e-3):
    ang = sorted(2 * math.atan(v) if v != math.inf else math.pi for v in t)
    return min(np.diff(ang + [ang[0] + 2 * math.pi])) >= gap


def _perm_sign(p):
    inv = sum(1 for i in range(3) for j in range(i + 1, 3) if p[i] > p[j])
    return -1 if inv % 2 else 1


@settings(max_examples=25, deadline=None)
@given(st.lists(boundary, min_size=3, max_size=3).filter(_separated), st.sampled_from(FUNCS))
def test_alternation_is_exact(t, f):
    t = [INFINITY if v == math.inf else v for v in t]
    base = cocycle_value(f, tuple(t), CFG)
    for p in itertools.permutations(range(3)):
        assert cocycle_value(f, tuple(t[i] for i in p), CFG) == _perm_sign(p) * base


def test_coincidence_gives_zero():
    f = gaussian_bump()
    assert cocycle_value(f, (0.5, 0.5, 2.0)) == 0.0
    assert cocycle_value(f, (INFINITY, 1.0, INFINITY)) == 0.0


def test_constant_signed_area():
    assert cocycle_value(constant(1.0), (-1.0, 1.0, INFINITY), CFG) == pytest.approx(math.pi, abs=TOL)
    assert cocycle_value(constant(1.0), (1.0, -1.0, INFINITY), CFG) == pytest.approx(-math.pi, abs=TOL)


def test_odd_vanishes_on_T0():
    assert abs(cocycle_value(odd_in_x(), (-1.0, 1.0, INFINITY), CFG)) <= TOL


def test_coboundary_examples():
    assert coboundary_defect(constant(1.0), (-2.0, -1.0, 1.0, INFINITY), CFG) <= 4 * TOL
    # repeated entry: two faces vanish, the rest cancel by alternation
    f = gaussian_bump()
    assert coboundary_defect(f, (0.3, 0.3, -2.0, 5.0), CFG) <= 4 * TOL
    assert coboundary(f, (1.0, 2.0, 1.0, -3.0), CFG) == 0.0


@pytest.mark.parametrize("f", FUNCS, ids=lambda f: f.name)
def test_coboundary_random(f):
    rep = coboundary_report(f, 20, seed=11, cfg=CFG)
    assert rep.n_samples == 20 and rep.max_defect <= 4 * TOL


def test_norm_bound():
    for f in FUNCS:
        for q in random_quadruples(10, seed=3):
            assert abs(cocycle_value(f, q[:3], CFG)) <= math.pi * f.sup_norm + TOL


def test_random_quadruples():
    qs = random_quadruples(50, seed=1)
    assert qs == random_quadruples(50, seed=1)
    assert len(qs) == 50 and all(len(q) == 4 for q in qs)
    for q in qs:
        ang = sorted(2 * math.atan(v) for v in q)
        gaps = np.diff(ang + [ang[0] + 2 * math.pi])
        assert gaps.min() >= 1e-3


def test_equivariance():
    rng = np.random.default_rng(8)
    f = gaussian_bump()
    for _ in range(5):
        g = MobiusTransform.translation(rng.uniform(-2, 2)) @ MobiusTransform(0, -1, 1, 0) @ MobiusTransform.dilation(rng.uniform(0.5, 2))
        t = tuple(float(v) for v in rng.standard_cauchy(3))
        assert equivariance_defect(f, g, t, CFG) <= 2 * TOL


def test_straight_cocycle():
    assert straight_cocycle_value(constant(1.0), GeodesicTriangle(Point(0, 1), Point(0, 1), Point(2, 1))) == 0.0
    t = GeodesicTriangle(Point(0, 1), Point(0.5, 2), Point(-1, 1.5))
    defect = math.pi - sum(triangle_angles(t))
    v = straight_cocycle_value(constant(1.0), t, CFG)
    assert abs(v) == pytest.approx(defect, abs=TOL)
    assert straight_cocycle_value(constant(1.0), GeodesicTriangle(t.p1, t.p0, t.p2), CFG) == pytest.approx(-v, abs=TOL)


def test_straight_converges_to_ideal():
    f = gaussian_bump()
    ideal = cocycle_value(f, (-1.0, 1.0, INFINITY), CFG)
    straight = straight_cocycle_value(f, pushed_triangle((-1.0, 1.0, INFINITY), 20.0), CFG)
    assert abs(straight - ideal) <= 1e-3


def test_straight_norm_bound():
    rng = np.random.default_rng(9)
    for f in FUNCS:
        pts = [Point(rng.uniform(-2, 2), math.exp(rng.uniform(-2, 2))) for _ in range(3)]
        assert abs(straight_cocycle_value(f, GeodesicTriangle(*pts), CFG)) <= math.pi * f.sup_norm + TOL


def test_invariance_examples():
    f = dilation_invariant()
    double = IsometrySample((MobiusTransform.dilation(2.0),))
    for t in [(-1.0, 1.0, INFINITY), (0.3, -2.0, 7.5)]:
        assert invariance_defect(f, double, t, CFG) <= 2 * TOL
    ident = IsometrySample((MobiusTransform(1, 0, 0, 1),))
    assert invariance_defect(gaussian_bump(), ident, (0.3, -2.0, 7.5), CFG) == 0.0
    with pytest.raises(NotInvariant):
        invariance_defect(gaussian_bump(), double, (0.3, -2.0, 7.5), CFG)


def test_dilation_words():
    words = dilation_words()
    assert len(words.elements) == 7
    check_invariance(dilation_invariant(2.0), words)
    for g in words.elements:
        a, b, c, d = g.coefficients
        assert a * d - b * c == pytest.approx(1.0, abs=1e-15)


def test_defect_report_json():
    rep = coboundary_report(constant(1.0), 5, seed=42, cfg=CFG)
    d = json.loads(rep.to_json())
    assert set(d) >= {"seed", "n_samples", "max_defect", "mean_defect", "tol"}
    assert d["seed"] == 42 and d["n_samples"] == 5 and d["tol"] == TOL
    assert rep.to_json() == coboundary_report(constant(1.0), 5, seed=42, cfg=CFG).to_json()
