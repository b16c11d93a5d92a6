"""Acceptance gate: ten end-to-end criteria at their stated tolerances.

Each test records one PASS/FAIL line; the lines are printed as the module
finishes (and immediately with ``pytest -s``).
"""

import itertools
import math

import numpy as np
import pytest

from hyptrig.cli import main
from hyptrig.cocycle import (
    IsometrySample,
    coboundary_report,
    cocycle_value,
    invariance_defect,
    random_quadruples,
)
from hyptrig.functions import catalog_functions, dilation_invariant, indicator
from hyptrig.helgason_fourier import (
    F_bb_numeric,
    F_numeric,
    fact_one_bound,
    fact_one_probe,
    factorized_transform,
    helgason_transform,
    wiener_zero_scan,
)
from hyptrig.hyperbolic_core import STANDARD_TRIPLE, GeodesicTriangle, MobiusTransform, Point, triangle_angles
from hyptrig.ideal_transform import ideal_transform
from hyptrig.quadrature import QuadratureConfig, integrate_geodesic_triangle, integrate_T0
from hyptrig.special_functions import (
    F_bb_closed,
    F_closed,
    beta_grid,
    beta_residual,
    duplication_residual,
    random_gamma_grid,
)

LN2 = math.log(2.0)
TOL = 1e-8
CFG = QuadratureConfig(tol=TOL)
LINES: dict[int, str] = {}


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.getplugin("terminalreporter")
    out = [LINES[k] for k in sorted(LINES)]
    if tr is not None:
        tr.write_line("")
        for line in out:
            tr.write_line(line)
    else:
        print("\n".join(out))


def record(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    LINES[n] = line
    print(line)
    assert ok, line


def random_isometry(rng) -> MobiusTransform:
    th = rng.uniform(-math.pi, math.pi)
    rot = MobiusTransform(math.cos(th), math.sin(th), -math.sin(th), math.cos(th))
    return (MobiusTransform.translation(rng.uniform(-3, 3))
            @ MobiusTransform.dilation(math.exp(rng.uniform(-1.5, 1.5))) @ rot)


def test_criterion_1_ideal_triangle_area():
    r = integrate_T0(lambda x, y: np.ones_like(x), CFG)
    err = abs(r.value - math.pi)
    record(1, err <= 1e-8, f"|int_T0 1 dA - pi| = {err:.2e} (<= 1e-8)")


def test_criterion_2_closed_form_spot_values():
    cases = [
        ("F(0,0)", F_numeric(0, 0, CFG), math.pi),
        ("F(1,0)", F_numeric(1, 0, CFG), 2 * LN2),
        ("F(2,0)", F_numeric(2, 0, CFG), math.pi / 4),
        ("F_bb(2,0)", F_bb_numeric(2, CFG), math.pi / 2),
        ("F_bb(1,0)", F_bb_numeric(1, CFG), 4 * (LN2 - 0.5)),
    ]
    # the closed forms must reproduce the same values at the removable points
    closed = [F_closed(0), F_closed(1), F_closed(2), F_bb_closed(2), F_bb_closed(1)]
    worst = max(abs(q - v) / abs(v) for _, q, v in cases)
    worst_closed = max(abs(c - v) / abs(v) for c, (_, _, v) in zip(closed, cases))
    record(2, worst <= 1e-6 and worst_closed <= 1e-6,
           f"max relative error quadrature {worst:.2e}, closed form {worst_closed:.2e} (<= 1e-6)")


def test_criterion_3_grid_agreement():
    grid = [complex(r, i) for r in (-0.5, 0.5, 1.0, 1.5, 2.5) for i in (-2.0, 0.0, 2.0)]
    dF = max(abs(F_numeric(s, 0.0, CFG) - F_closed(s)) / (1 + abs(F_closed(s))) for s in grid)
    dB = max(abs(F_bb_numeric(s, CFG) - F_bb_closed(s)) / (1 + abs(F_bb_closed(s))) for s in grid)
    record(3, dF <= 1e-6 and dB <= 1e-5,
           f"15-point grid: F {dF:.2e} (<= 1e-6), F_bb {dB:.2e} (<= 1e-5)")


def test_criterion_4_transform_factorization():
    f = indicator(STANDARD_TRIPLE)
    worst = 0.0
    for lam, b in itertools.product((0, 1, -0.5j), (0.0, 0.5, 3.0)):
        v = factorized_transform(lam, b, CFG)
        worst = max(worst, abs(helgason_transform(f, lam, b, CFG) - v) / (1 + abs(v)))
    record(4, worst <= 1e-4, f"9-point (lambda, b) factorization, max relative gap {worst:.2e} (<= 1e-4)")


def test_criterion_5_zero_scan_certificate(tmp_path, capsys):
    code = main(["zero-scan", "--out", str(tmp_path / "scan.csv")])
    capsys.readouterr()
    r = wiener_zero_scan(spot_check=False)
    target = 2 * math.pi / LN2
    near = [(z, m) for name, z, m in r.factor_zeros
            if name == "F" and abs(abs(z.imag) - target) < 0.05 and m < 1e-3]
    ok = code == 0 and r.min_joint > 1e-8 and bool(near)
    found = ", ".join(f"{z.real:g}{z.imag:+g}i (|F|={m:.1e})" for z, m in near)
    record(5, ok, f"exit {code}, min_joint {r.min_joint:.3g} (> 1e-8), factor zeros {found or 'none'}")


def test_criterion_6_fact_one():
    rows = fact_one_probe(0.5)
    vals = [v for _, v in rows]
    mono = all(a < b for a, b in zip(vals, vals[1:]))
    bound = fact_one_bound(0.5)
    record(6, mono and vals[-1] < bound,
           f"monotone={mono}, value at y_cap={rows[-1][0]:g} is {vals[-1]:.4f} (< {bound:.2f})")


def test_criterion_7_gamma_identities():
    dup = duplication_residual(random_gamma_grid())
    beta = beta_residual(beta_grid())
    record(7, dup <= 1e-9 and beta <= 1e-8, f"duplication {dup:.2e} (<= 1e-9), beta {beta:.2e} (<= 1e-8)")


def test_criterion_8_cocycle_suite():
    funcs = catalog_functions()
    quads = random_quadruples(100, seed=42)
    # alternation must hold bit-for-bit
    alternation = True
    for f in funcs:
        for q in quads[:5]:
            t = q[:3]
            base = cocycle_value(f, t, CFG)
            for p in itertools.permutations(range(3)):
                sign = 1 if p in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1
                alternation &= cocycle_value(f, tuple(t[i] for i in p), CFG) == sign * base
    worst = max(coboundary_report(f, len(quads), 42, CFG, quads).max_defect for f in funcs)
    norm = max(abs(cocycle_value(f, q[:3], CFG)) - math.pi * f.sup_norm for f in funcs for q in quads[:20])
    sample = IsometrySample((MobiusTransform.dilation(2.0),))
    inv = max(invariance_defect(dilation_invariant(), sample, q[:3], CFG) for q in quads[:20])
    ok = alternation and worst <= 4 * TOL and norm <= TOL and inv <= 2 * TOL
    record(8, ok, f"alternation exact={alternation}, coboundary {worst:.2e} (<= {4 * TOL:g}), "
                  f"norm excess {norm:.2e} (<= {TOL:g}), invariance {inv:.2e} (<= {2 * TOL:g})")


def test_criterion_9_gauss_bonnet():
    rng = np.random.default_rng(2024)
    one = lambda x, y: np.ones_like(x)
    worst = 0.0
    for _ in range(20):
        t = GeodesicTriangle(*(Point(rng.uniform(-3, 3), math.exp(rng.uniform(-2, 2))) for _ in range(3)))
        area = integrate_geodesic_triangle(one, t, CFG).value.real
        worst = max(worst, abs(area - (math.pi - sum(triangle_angles(t)))))
    record(9, worst <= 1e-6, f"20 random geodesic triangles, max |area - angle defect| {worst:.2e} (<= 1e-6)")


def test_criterion_10_equivariance():
    rng = np.random.default_rng(10)
    funcs = catalog_functions()
    worst = 0.0
    for k in range(20):
        f = funcs[k % len(funcs)]
        g, h = random_isometry(rng), random_isometry(rng)
        hi = h.inverse()
        worst = max(worst, abs(ideal_transform(f, hi @ g, cfg=CFG) - ideal_transform(f.compose(hi), g, cfg=CFG)))
    record(10, worst <= 2 * TOL, f"20 random (g, h) pairs, max gap {worst:.2e} (<= {2 * TOL:g})")
