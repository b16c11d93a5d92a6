"""Adaptive integration against dA = dx dy / y^2.

The workhorse is a globally adaptive tensor Gauss-Legendre rule (7 points per
axis) on rectangles of a chart.  A cell's error is |Q(cell) - sum Q(quarters)|
and the worst cells are quadrisected until the accumulated error meets the
target.

The standard ideal triangle T0 = {|x| < 1, y > sqrt(1 - x^2)} is integrated
by folding: the elliptic isometry R of order three about i*sqrt(3) permutes
the cusps (-1, 1, oo), so T0 is the union of R^k(P), k = 0, 1, 2, where P is
the neighbourhood of the cusp at oo cut off by the geodesics from i*sqrt(3)
to the feet -1 + 2i and 1 + 2i.  Hence

    int_T0 f dA = sum_k int_P f o R^k dA,

and no corner singularity ever appears.  On P a log-height chart
y = h(x) exp(v) turns every cusp into an exponentially decaying tail, which
is cut where the analytic tail bound drops below a fraction of ``tol``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import MaxDepthExceeded, TailDivergent
from .hyperbolic_core import (
    BASEPOINT,
    GeodesicTriangle,
    Point,
    _direction,
    IdealTriple,
    MobiusTransform,
    canonical_triple,
    mobius_to_standard_triple,
    triangle_orientation,
)

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(7)
_W2 = np.outer(_WEIGHTS, _WEIGHTS)

def worker_count() -> int:
    """Thread pool size; HYPTRIG_THREADS caps it."""
    env = os.environ.get("HYPTRIG_THREADS", "").strip()
    if env.isdigit():
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


# share of tol reserved for the truncation tails
TAIL_SHARE = 0.05
Y_CEILING = 1e150


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerance and tail data for one integration.

    ``tail_exponent`` (alpha) and ``tail_constant`` (C) describe the decay
    |f(x, y)| <= C min(y, 1/y)^alpha on T0; alpha = 0, C = sup|f| is right
    for any bounded f.  ``y_cap = inf`` integrates the whole of T0, a finite
    ``y_cap`` restricts to T0 n {y <= y_cap} and reports the remaining tail
    in the error estimate.
    """

    tol: float = 1e-10
    max_depth: int = 48
    y_cap: float = math.inf
    tail_exponent: float = 0.0
    tail_constant: float = 1.0
    max_evaluations: int = 50_000_000

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not self.y_cap >= 2.0:
            # the folded corner pieces reach height 2
            raise ValueError("y_cap must be >= 2")
        if self.tail_constant < 0:
            raise ValueError("tail_constant must be nonnegative")


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    error_estimate: float
    evaluations: int
    tail_bound: float = 0.0

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be nonnegative")

    def scaled(self, factor: float) -> "IntegralResult":
        return replace(self, value=self.value * factor)


def _fsum_complex(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _rule_2d(g: Integrand, cells: np.ndarray) -> np.ndarray:
    """7x7 Gauss-Legendre on each row (u0, u1, v0, v1) of ``cells``."""
    hu = 0.5 * (cells[:, 1] - cells[:, 0])
    cu = 0.5 * (cells[:, 1] + cells[:, 0])
    hv = 0.5 * (cells[:, 3] - cells[:, 2])
    cv = 0.5 * (cells[:, 3] + cells[:, 2])
    U = cu[:, None, None] + hu[:, None, None] * _NODES[None, :, None]
    V = cv[:, None, None] + hv[:, None, None] * _NODES[None, None, :]
    U, V = np.broadcast_arrays(U, V)
    vals = np.asarray(g(U, V), dtype=complex)
    return np.einsum("nij,ij->n", vals, _W2) * hu * hv


def _quarters(cells: np.ndarray) -> np.ndarray:
    """Children of each cell, shape (4n, 4), in blocks of four per parent."""
    u0, u1, v0, v1 = cells.T
    um = 0.5 * (u0 + u1)
    vm = 0.5 * (v0 + v1)
    kids = np.stack(
        [
            np.stack([u0, um, v0, vm], axis=1),
            np.stack([um, u1, v0, vm], axis=1),
            np.stack([u0, um, vm, v1], axis=1),
            np.stack([um, u1, vm, v1], axis=1),
        ],
        axis=1,
    )
    return kids.reshape(-1, 4)


def adaptive_2d(g: Integrand, cells: Sequence[Sequence[float]], tol: float,
                max_depth: int = 48, max_evaluations: int = 50_000_000) -> IntegralResult:
    """Integrate ``g`` over the union of the given chart rectangles."""
    cells = np.asarray(cells, dtype=float).reshape(-1, 4)
    npts = _W2.size
    coarse = _rule_2d(g, cells)
    kids = _quarters(cells)
    kid_vals = _rule_2d(g, kids).reshape(-1, 4)
    evals = npts * 5 * len(cells)
    fine = kid_vals.sum(axis=1)
    err = np.abs(coarse - fine)
    depth = np.zeros(len(cells), dtype=int)

    while True:
        total = math.fsum(err)
        if total <= tol:
            break
        if not math.isfinite(total):
            raise MaxDepthExceeded("integrand returned non-finite values")
        order = np.lexsort((np.arange(len(err)), -err))
        cum = np.cumsum(err[order])
        k = int(np.searchsorted(cum, 0.5 * total)) + 1
        pick = order[: min(k, 4096)]
        if np.any(depth[pick] >= max_depth):
            raise MaxDepthExceeded(f"error {total:.3e} above tol {tol:.3e} at depth {max_depth}")
        if evals > max_evaluations:
            raise MaxDepthExceeded(f"error {total:.3e} above tol {tol:.3e} after {evals} evaluations")

        new_cells = _quarters(cells[pick])
        new_coarse = kid_vals[pick].reshape(-1)
        grand = _rule_2d(g, _quarters(new_cells)).reshape(-1, 4)
        evals += npts * len(new_cells) * 4
        new_fine = grand.sum(axis=1)

        keep = np.ones(len(cells), dtype=bool)
        keep[pick] = False
        cells = np.concatenate([cells[keep], new_cells])
        kid_vals = np.concatenate([kid_vals[keep], grand])
        fine = np.concatenate([fine[keep], new_fine])
        err = np.concatenate([err[keep], np.abs(new_coarse - new_fine)])
        depth = np.concatenate([depth[keep], np.repeat(depth[pick] + 1, 4)])

    return IntegralResult(_fsum_complex(fine), total, evals)


def _rule_1d(g, cells: np.ndarray) -> np.ndarray:
    h = 0.5 * (cells[:, 1] - cells[:, 0])
    c = 0.5 * (cells[:, 1] + cells[:, 0])
    T = c[:, None] + h[:, None] * _NODES[None, :]
    vals = np.asarray(g(T), dtype=complex)
    return (vals @ _WEIGHTS) * h


def adaptive_1d(g: Callable[[np.ndarray], np.ndarray], breaks: Sequence[float], tol: float,
                max_depth: int = 60) -> IntegralResult:
    """Globally adaptive 7-point Gauss-Legendre on the intervals between ``breaks``."""
    br = np.asarray(breaks, dtype=float)
    cells = np.stack([br[:-1], br[1:]], axis=1)
    coarse = _rule_1d(g, cells)

    def halves(c):
        m = 0.5 * (c[:, 0] + c[:, 1])
        return np.stack([np.stack([c[:, 0], m], 1), np.stack([m, c[:, 1]], 1)], 1).reshape(-1, 2)

    kid_vals = _rule_1d(g, halves(cells)).reshape(-1, 2)
    evals = 3 * 7 * len(cells)
    fine = kid_vals.sum(axis=1)
    err = np.abs(coarse - fine)
    depth = np.zeros(len(cells), dtype=int)
    while True:
        total = math.fsum(err)
        if total <= tol:
            break
        if not math.isfinite(total):
            raise MaxDepthExceeded("integrand returned non-finite values")
        order = np.lexsort((np.arange(len(err)), -err))
        k = int(np.searchsorted(np.cumsum(err[order]), 0.5 * total)) + 1
        pick = order[:k]
        if np.any(depth[pick] >= max_depth):
            raise MaxDepthExceeded(f"error {total:.3e} above tol {tol:.3e} at depth {max_depth}")
        new_cells = halves(cells[pick])
        new_coarse = kid_vals[pick].reshape(-1)
        grand = _rule_1d(g, halves(new_cells)).reshape(-1, 2)
        evals += 14 * len(new_cells)
        new_fine = grand.sum(axis=1)
        keep = np.ones(len(cells), dtype=bool)
        keep[pick] = False
        cells = np.concatenate([cells[keep], new_cells])
        kid_vals = np.concatenate([kid_vals[keep], grand])
        fine = np.concatenate([fine[keep], new_fine])
        err = np.concatenate([err[keep], np.abs(new_coarse - new_fine)])
        depth = np.concatenate([depth[keep], np.repeat(depth[pick] + 1, 2)])
    return IntegralResult(_fsum_complex(fine), total, evals)


def integrate_exp_tail(g: Callable[[np.ndarray], np.ndarray], decay: float, tol: float,
                       t_max: float = 640.0) -> IntegralResult:
    """int_0^oo g(t) dt for g = O(exp(-decay * t)).

    Cut at T with exp(-decay T) ~ 1e-18 (capped at ``t_max``); the neglected
    part is estimated by |g(T)| / decay and added to the error.
    """
    if not decay > 0:
        raise TailDivergent(f"decay rate {decay} is not positive")
    T = min(42.0 / decay, t_max)
    breaks = [0.0]
    step = min(1.0, 1.0 / decay)
    while breaks[-1] < T:
        breaks.append(min(T, breaks[-1] + step))
        step *= 1.15
    res = adaptive_1d(g, breaks, 0.95 * tol)
    tail = float(np.abs(np.asarray(g(np.array([T])), dtype=complex))[0]) / decay
    return IntegralResult(res.value, res.error_estimate + tail, res.evaluations, tail)


# ---------------------------------------------------------------------------
# the standard ideal triangle
# ---------------------------------------------------------------------------

ROTATION = MobiusTransform(-1.0, -3.0, 1.0, -1.0)  # -1 -> 1 -> oo -> -1, fixes i*sqrt(3)
_FOLD_MAPS = (MobiusTransform.identity(), ROTATION, ROTATION @ ROTATION)


def _fold_floor(x):
    # lower boundary of P: circles of radius 2 about -1 and +1 through i*sqrt(3)
    return np.sqrt(4.0 - (1.0 - np.abs(x)) ** 2)


def tail_bound_T0(alpha: float, C: float, y_top: float, y_corner: float) -> float:
    """Bound for the parts of T0 above ``y_top`` and inside the corner horoballs.

    With |f| <= C min(y, 1/y)^alpha, the region y > Y contributes at most
    2 C Y^-(1+alpha)/(1+alpha).  R maps {y > Y} in P into the horoball of
    Euclidean diameter 4/Y at a corner, where T0 has width <= y^2, giving
    C (4/Y)^(1+alpha)/(1+alpha) per corner.
    """
    e = 1.0 + alpha
    top = 0.0 if math.isinf(y_top) else 2.0 * C * y_top ** (-e) / e
    corner = 2.0 * C * (4.0 / y_corner) ** e / e
    return top + corner


def _auto_height(alpha: float, C: float, budget: float) -> float:
    e = 1.0 + alpha
    if C <= 0:
        return 4.0
    # total bound 2C(1 + 4^e) Y^-e / e <= budget
    logY = (math.log(2.0 * C * (1.0 + 4.0 ** e) / (e * budget))) / e
    return min(max(math.exp(min(logY, 700.0)), 4.0), Y_CEILING)


def _t0_fold_cells(L_max: float) -> list[list[float]]:
    # initial w-breaks at roughly unit steps in v, growing geometrically
    ws = [0.0]
    v, step = 0.0, 0.5
    while v < L_max:
        v = min(L_max, v + step)
        ws.append(v / L_max)
        step = min(step * 1.25, 4.0)
    cells = []
    for strip in range(6):
        for w0, w1 in zip(ws[:-1], ws[1:]):
            cells.append([float(strip), float(strip + 1), w0, w1])
    return cells


def integrate_T0(f: Integrand, cfg: QuadratureConfig | None = None) -> IntegralResult:
    """int_{T0} f dA for a vectorized integrand f(x, y)."""
    cfg = cfg or QuadratureConfig()
    alpha, C = cfg.tail_exponent, cfg.tail_constant
    if not alpha > -1.0:
        raise TailDivergent(f"tail exponent {alpha} <= -1: integral over T0 may diverge")
    y_auto = _auto_height(alpha, C, TAIL_SHARE * cfg.tol)
    y_top = cfg.y_cap if math.isfinite(cfg.y_cap) else y_auto
    tail = tail_bound_T0(alpha, C, cfg.y_cap if math.isfinite(cfg.y_cap) else y_auto, y_auto)

    coef = np.array([m.coefficients for m in _FOLD_MAPS])  # (3, 4)
    log_cut = np.array([math.log(y_top), math.log(y_auto), math.log(y_auto)])

    def chart(u, w):
        strip = np.floor(u).astype(int)
        piece = strip // 2
        x = u - strip - 1.0 + (strip % 2)  # even strips -> [-1, 0], odd -> [0, 1]
        h = _fold_floor(x)
        L = log_cut[piece] - np.log(h)
        y = h * np.exp(w * L)
        a, b, c, d = (coef[piece, j] for j in range(4))
        p = c * x + d
        q = c * y
        den = p * p + q * q
        X = ((a * x + b) * p + a * c * y * y) / den
        Y = y / den
        return np.asarray(f(X, Y)) * (L / y)

    L_max = max(log_cut) - math.log(math.sqrt(3.0))
    res = adaptive_2d(chart, _t0_fold_cells(L_max), (1.0 - TAIL_SHARE) * cfg.tol,
                      cfg.max_depth, cfg.max_evaluations)
    return IntegralResult(res.value, res.error_estimate + tail, res.evaluations, tail)


def pullback(f: Integrand, m: MobiusTransform) -> Integrand:
    """The integrand f o m."""

    def g(x, y):
        X, Y = m.apply_xy(x, y)
        return f(X, Y)

    return g


def integrate_ideal_triangle(f: Integrand, t: IdealTriple,
                             cfg: QuadratureConfig | None = None) -> IntegralResult:
    """Signed integral of f dA over the ideal triangle spanned by ``t``.

    The vertices are first sorted into the positively oriented
    representative, so all orderings of one vertex set share a single
    quadrature and differ exactly by the permutation sign.
    """
    sign, canon = canonical_triple(*t.vertices)
    m = mobius_to_standard_triple(canon)
    res = integrate_T0(pullback(f, m.inverse()), cfg)
    return res.scaled(sign)


def _strip_cells(spans: Sequence[float]) -> list[list[float]]:
    cells = []
    for k, span in enumerate(spans):
        n_phi = max(1, int(math.ceil(abs(span) / 0.25)))
        for j in range(n_phi):
            cells.append([k + j / n_phi, k + (j + 1) / n_phi, 0.0, 1.0])
    return cells


def _hyperboloid(p: Point) -> np.ndarray:
    r2 = p.x * p.x + p.y * p.y
    return np.array([(r2 + 1.0) / (2.0 * p.y), (r2 - 1.0) / (2.0 * p.y), p.x / p.y])


def normalizing_map(verts: Sequence[Point]) -> MobiusTransform:
    """An isometry putting the hyperboloid centroid of ``verts`` at i, with no vertex straight above it.

    Far-out vertices then sit near well separated finite boundary points,
    so no side of the image is close to a vertical line.
    """
    v = sum(_hyperboloid(p) for p in verts)
    v = v / math.sqrt(v[0] * v[0] - v[1] * v[1] - v[2] * v[2])
    cy = 1.0 / (v[0] - v[1])
    to_i = MobiusTransform(1.0 / cy, -v[2], 0.0, 1.0)  # x/y = v2, so (z - cx)/cy
    angles = sorted(math.atan2(d.imag, d.real) for d in (_direction(BASEPOINT, to_i(p)) for p in verts))
    gaps = [(angles[(k + 1) % 3] - angles[k]) % (2.0 * math.pi) for k in range(3)]
    k = max(range(3), key=lambda j: gaps[j])
    mid = angles[k] + 0.5 * gaps[k]
    th = 0.5 * (0.5 * math.pi - mid)  # rotation about i turns directions by 2 th
    rot = MobiusTransform(math.cos(th), math.sin(th), -math.sin(th), math.cos(th))
    return rot @ to_i


def _side(p: Point, q: Point):
    """(xp, rho, phi_p, dphi, top) of the arc p -> q, or None for a vertical side."""
    dx = q.x - p.x
    if abs(dx) <= 1e-15 * (abs(p.x) + abs(q.x) + p.y + q.y):
        return None
    c = (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y) / (2.0 * dx)
    ux, vx = p.x - c, q.x - c
    rho = math.hypot(ux, p.y)
    phi_p = math.atan2(p.y, ux)
    dphi = math.atan2(ux * q.y - p.y * vx, ux * vx + p.y * q.y)
    lo, hi = sorted((phi_p, phi_p + dphi))
    top = rho if lo <= 0.5 * math.pi <= hi else max(p.y, q.y)
    return p.x, rho, phi_p, dphi, top


def integrate_geodesic_triangle(f: Integrand, t: GeodesicTriangle,
                                cfg: QuadratureConfig | None = None) -> IntegralResult:
    """Integral of f dA over the compact geodesic triangle; 0 if degenerate.

    Each vertical line meets the triangle in one segment, so the region is a
    signed sum over its sides of "the part between this side and height Y",
    with Y above every side.  A side is an arc of a circle of radius rho
    centred on R; in the chart x = c + rho cos(phi), y = rho sin(phi)/eta
    the area element is exactly d(phi) d(eta).
    """
    cfg = cfg or QuadratureConfig()
    o = triangle_orientation(t)
    if o == 0:
        return IntegralResult(0.0, 0.0, 0)
    m = normalizing_map(t.vertices)
    verts = [m(p) for p in t.vertices]
    g = pullback(f, m.inverse())
    sides = [_side(p, q) for p, q in zip(verts, verts[1:] + verts[:1])]
    sides = [sd for sd in sides if sd is not None]
    Y = max(sd[4] for sd in sides)
    arr = np.array([sd[:4] for sd in sides])

    def chart(u, w):
        k = np.minimum(np.floor(u).astype(int), len(sides) - 1)
        xp, rho, phi_p, dphi = (arr[k, j] for j in range(4))
        delta = (u - k) * dphi
        phi = phi_p + delta
        # x - xp = rho (cos phi - cos phi_p), written without cancellation
        x = xp - 2.0 * rho * np.sin(phi_p + 0.5 * delta) * np.sin(0.5 * delta)
        arc = rho * np.sin(phi)
        eta0 = arc / Y
        eta = eta0 + w * (1.0 - eta0)
        # the strip above a side traversed with increasing x is subtracted:
        # dx = -arc d(phi), so the signs combine to -(1 - eta0) dphi
        return -np.asarray(g(x, arc / eta)) * (1.0 - eta0) * dphi

    res = adaptive_2d(chart, _strip_cells(arr[:, 3]), cfg.tol, cfg.max_depth, cfg.max_evaluations)
    return res.scaled(o)


def integrate_strip(f: Integrand, p: tuple[float, float], q: tuple[float, float],
                    cfg: QuadratureConfig | None = None) -> IntegralResult:
    """Integral of f dA over the region above the geodesic arc from p to q.

    Endpoints are (x, y) pairs with y >= 0; y = 0 is an ideal endpoint.  The
    region runs up to the cusp at oo, so f should be bounded and smooth
    there.  Signed by the direction of travel in x.
    """
    cfg = cfg or QuadratureConfig()
    (px, py), (qx, qy) = p, q
    c = (qx * qx + qy * qy - px * px - py * py) / (2.0 * (qx - px))
    rho = math.hypot(px - c, py)
    f0, f1 = math.atan2(py, px - c), math.atan2(qy, qx - c)

    def chart(phi, eta):
        x = c + rho * np.cos(phi)
        y = rho * np.sin(phi) / eta
        return np.asarray(f(x, y))

    lo, hi = min(f0, f1), max(f0, f1)
    n = max(1, int(math.ceil((hi - lo) / 0.25)))
    phis = np.linspace(lo, hi, n + 1)
    etas = [0.0, 0.125, 0.25, 0.5, 1.0]
    cells = [[a, b, e0, e1] for a, b in zip(phis[:-1], phis[1:]) for e0, e1 in zip(etas[:-1], etas[1:])]
    res = adaptive_2d(chart, cells, cfg.tol, cfg.max_depth, cfg.max_evaluations)
    return res.scaled(-1.0 if f1 > f0 else 1.0)
