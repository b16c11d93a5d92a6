"""Plane waves, the Helgason-Fourier transform, F(s, b) and the joint-zero scan.

For the indicator of T0 the transform at (lambda, b) equals
(b^2 + 1)^s F(s, b) with s = 1 - i lambda, where

    F(s, b) = int_{T0} (y / ((x - b)^2 + y^2))^s dA.

``F_numeric`` and ``F_bb_numeric`` evaluate F(s, 0) and its second
b-derivative by one-dimensional polar reductions, and F(s, b) for b != 0 by
two-dimensional quadrature over T0.  The scan compares the closed forms over a
rectangle of s and checks that they never vanish together.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BadBoundaryParameter, OutsideP, TailDivergent, UnsupportedFunction
from .functions import FunctionSpec
from .hyperbolic_core import (
    BASEPOINT,
    BoundaryPoint,
    IdealTriple,
    Point,
    as_boundary,
    busemann,
    busemann_xy,
    canonical_triple,
    distance_xy,
    mobius_to_standard_triple,
)
from .quadrature import IntegralResult, QuadratureConfig, integrate_exp_tail, integrate_T0, worker_count
from .special_functions import F_bb_closed, F_closed, SpectralParameter

JOINT_ZERO_TOL = 1e-8
FACTOR_ZERO_TOL = 1e-3
SPOT_CHECK_STRIDE = 50
BOUNDARY_GUARD = 1e-9


@dataclass(frozen=True)
class Frequency:
    """lambda in the strip |Im lambda| <= 1 + strip_margin."""

    lam: complex
    strip_margin: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        if self.strip_margin < 0:
            raise ValueError("strip_margin must be >= 0")
        if abs(self.lam.imag) > 1.0 + self.strip_margin:
            raise ValueError(f"|Im lambda| = {abs(self.lam.imag)} outside the strip of width {1 + self.strip_margin}")

    @property
    def s(self) -> complex:
        return 1.0 - 1j * self.lam


def _lam(lam) -> complex:
    return lam.lam if isinstance(lam, Frequency) else complex(lam)


def _s_value(s) -> complex:
    return SpectralParameter(s).s if not isinstance(s, SpectralParameter) else s.s


def plane_wave(lam, b, z: Point) -> complex:
    """e^{(i lambda + 1) <z, b>}."""
    return complex(np.exp((1j * _lam(lam) + 1.0) * busemann(z, as_boundary(b))))


# ---------------------------------------------------------------------------
# one-dimensional polar reductions
# ---------------------------------------------------------------------------

_QUARTER = math.pi / 4.0
_LOG_QUARTER = math.log(_QUARTER)


def _one_minus_pow_over_sq(a: complex, theta: np.ndarray) -> np.ndarray:
    # (1 - cos^a theta) / theta^2
    half = np.sin(0.5 * theta)
    log_cos = np.log1p(-2.0 * half * half)
    small = theta < 1e-5
    t = np.where(small, 1.0, theta)
    out = -np.expm1(a * log_cos) / (t * t)
    series = a / 2.0 - theta * theta * (a * a / 8.0 - a / 12.0)
    return np.where(small, series, out)


def _sinc(t: np.ndarray) -> np.ndarray:
    return np.where(t == 0.0, 1.0, np.sin(t) / np.where(t == 0.0, 1.0, t))


def _polar_integral(s: complex, a: complex, weight, tol: float) -> IntegralResult:
    """int_0^{pi/2} (1 - cos^a th) sin^{s-2} th * weight(sin^2 th) d th.

    Both halves of [0, pi/2] are mapped to half-lines by th = (pi/4) e^{-t}
    (resp. pi/2 - th = (pi/4) e^{-t}), so the algebraic endpoint behaviour
    becomes exponential decay.
    """

    def left(t):
        log_th = _LOG_QUARTER - t
        th = np.exp(log_th)
        # sin^{s-2}(th) * th^3 = th^{s+1} (sin th / th)^{s-2}; th^3 is dth/dt * th^2
        power = np.exp((s + 1.0) * log_th + (s - 2.0) * np.log(_sinc(th)))
        return _one_minus_pow_over_sq(a, th) * power * weight(np.sin(th) ** 2)

    def right(t):
        log_u = _LOG_QUARTER - t
        u = np.exp(log_u)
        # u * (1 - sin^a u), sin u = u sinc u
        head = u - np.exp(a * (log_u + np.log(_sinc(u))) + log_u)
        return head * np.cos(u) ** (s - 2.0) * weight(np.cos(u) ** 2)

    sig = s.real
    lres = integrate_exp_tail(left, 1.0 + sig, 0.5 * tol)
    rres = integrate_exp_tail(right, min(1.0, 1.0 + a.real), 0.5 * tol)
    return IntegralResult(lres.value + rres.value, lres.error_estimate + rres.error_estimate,
                          lres.evaluations + rres.evaluations, lres.tail_bound + rres.tail_bound)


def _planar_config(cfg: QuadratureConfig, alpha: float, C: float) -> QuadratureConfig:
    return QuadratureConfig(tol=cfg.tol, max_depth=cfg.max_depth, y_cap=cfg.y_cap,
                            tail_exponent=alpha, tail_constant=C, max_evaluations=cfg.max_evaluations)


def _ratio_bound(b: float, sigma: float) -> float:
    # sup over T0 of (y/((x-b)^2+y^2))^sigma / min(y, 1/y)^sigma
    c_b = min((1.0 - b) ** 2, (1.0 + b) ** 2)
    c_t = min(1.0, c_b)
    k_b = (1.0 + abs(b)) ** 2 + 1.0
    return max(k_b ** (-sigma), c_t ** (-sigma))


def F_planar(s, b: float, cfg: QuadratureConfig | None = None) -> IntegralResult:
    """F(s, b) by two-dimensional quadrature over T0."""
    s = _s_value(s)
    b = float(b)
    if min(abs(b - 1.0), abs(b + 1.0)) < BOUNDARY_GUARD:
        raise BadBoundaryParameter(f"b = {b} is a vertex of T0")
    cfg = cfg or QuadratureConfig()

    def f(x, y):
        return np.exp(s * np.log(y / ((x - b) ** 2 + y * y)))

    return integrate_T0(f, _planar_config(cfg, s.real, _ratio_bound(b, s.real)))


def F_numeric_result(s, b: float = 0.0, cfg: QuadratureConfig | None = None) -> IntegralResult:
    s = _s_value(s)
    cfg = cfg or QuadratureConfig()
    if b != 0.0:
        return F_planar(s, b, cfg)
    if s == 0:
        return IntegralResult(complex(math.pi), 0.0, 0)
    res = _polar_integral(s, s, lambda q: 1.0, cfg.tol * min(1.0, abs(s) / 2.0))
    return res.scaled(2.0 / s)


def F_numeric(s, b: float = 0.0, cfg: QuadratureConfig | None = None) -> complex:
    """F(s, b); b = 0 by the polar reduction, otherwise over T0 in the plane."""
    return F_numeric_result(s, b, cfg).value


def F_bb_numeric_result(s, cfg: QuadratureConfig | None = None) -> IntegralResult:
    s = _s_value(s)
    cfg = cfg or QuadratureConfig()
    c1 = 2.0 * s * s + s
    c2 = 2.0 * s * s + 2.0 * s
    res = _polar_integral(s, s + 2.0, lambda q: c1 - c2 * q, cfg.tol * min(1.0, abs(s + 2.0) / 4.0))
    return res.scaled(4.0 / (s + 2.0))


def F_bb_numeric(s, cfg: QuadratureConfig | None = None) -> complex:
    """Second b-derivative of F(s, b) at b = 0 by the polar reduction."""
    return F_bb_numeric_result(s, cfg).value


def F_bb_planar(s, cfg: QuadratureConfig | None = None) -> IntegralResult:
    """The second b-derivative at b = 0 integrated over T0 in the plane."""
    s = _s_value(s)
    cfg = cfg or QuadratureConfig()
    c = 4.0 * s * s + 2.0 * s

    def f(x, y):
        r2 = x * x + y * y
        return np.exp(s * np.log(y / r2)) * (c * x * x - 2.0 * s * y * y) / (r2 * r2)

    C = (abs(c) + 2.0 * abs(s)) * max(2.0 ** (-s.real), 1.0)
    return integrate_T0(f, _planar_config(cfg, s.real, C))


# ---------------------------------------------------------------------------
# Helgason-Fourier transform
# ---------------------------------------------------------------------------

def _support_chart(support: IdealTriple, b: BoundaryPoint):
    """Positively oriented relabelling of ``support`` (with b last if b is a vertex), its sign and map to T0."""
    sign, canon = canonical_triple(*support.vertices)
    verts = canon.vertices
    if b in verts:
        k = verts.index(b)
        verts = verts[k + 1:] + verts[: k + 1]
        canon = IdealTriple(*verts)
    return sign, canon, mobius_to_standard_triple(canon)


def helgason_transform_result(f: FunctionSpec, lam, b, cfg: QuadratureConfig | None = None) -> IntegralResult:
    """int f(z) e^{(1 - i lambda) <z, b>} dA(z) over the support triangle of f."""
    if f.support is None:
        raise UnsupportedFunction(f"{f.name}: the transform needs a function supported on an ideal triangle")
    if f.decay_exponent is None:
        raise UnsupportedFunction(f"{f.name}: no decay metadata")
    cfg = cfg or QuadratureConfig()
    s = 1.0 - 1j * _lam(lam)
    b = as_boundary(b)
    sign, canon, m = _support_chart(f.support, b)
    minv = m.inverse()
    bp = m.apply_boundary(b)
    # <m^-1 w, b> = <w, m b> + K
    K = busemann(minv(BASEPOINT), b)
    scale = abs(np.exp(s * K)) * f.sup_norm
    sig = s.real
    if bp.is_infinity:
        alpha, C = -abs(sig), scale
    else:
        v = bp.value
        alpha = sig
        C = scale * (v * v + 1.0) ** sig * _ratio_bound(v, sig)
    if not alpha > -1.0:
        raise TailDivergent(f"Re(s) = {sig}: the transform does not converge at this (lambda, b)")
    base = f.func

    def g(x, y):
        X, Y = minv.apply_xy(x, y)
        return base(X, Y) * np.exp(s * (busemann_xy(x, y, bp) + K))

    res = integrate_T0(g, _planar_config(cfg, alpha, C))
    return res.scaled(sign)


def helgason_transform(f: FunctionSpec, lam, b, cfg: QuadratureConfig | None = None) -> complex:
    return helgason_transform_result(f, lam, b, cfg).value


def factorized_transform(lam, b: float, cfg: QuadratureConfig | None = None) -> complex:
    """(b^2 + 1)^s F(s, b) with s = 1 - i lambda."""
    s = 1.0 - 1j * _lam(lam)
    return complex(np.exp(s * math.log(b * b + 1.0))) * F_numeric(s, b, cfg)


def upper_cusp_transform(lam, cfg: QuadratureConfig | None = None) -> complex:
    """int_{T0} y^s dA by integrating out x: 2 int_0^1 (int_{sqrt(1-x^2)}^oo y^(s-2) dy) dx.

    Needs -1 < Re(s) < 1.
    """
    s = 1.0 - 1j * _lam(lam)
    if not -1.0 < s.real < 1.0:
        raise TailDivergent(f"Re(s) = {s.real} outside (-1, 1)")
    cfg = cfg or QuadratureConfig()

    # x = cos(th): (1 - x^2)^((s-1)/2) / (1 - s) dx = sin^s(th) / (1 - s) d(th); th = (pi/2) e^{-t}
    def g(t):
        th = 0.5 * math.pi * np.exp(-t)
        return th * np.exp(s * np.log(np.sin(th)))

    res = integrate_exp_tail(g, 1.0 + s.real, cfg.tol)
    return 2.0 * res.value / (1.0 - s)


# ---------------------------------------------------------------------------
# holomorphy and finite-difference probes
# ---------------------------------------------------------------------------

def cauchy_riemann_gap(s0: complex, h: float = 1e-4, cfg: QuadratureConfig | None = None) -> float:
    """|dF/d(Im s) - i dF/d(Re s)| at s0 from centred differences of F_numeric(., 0)."""
    cfg = cfg or QuadratureConfig(tol=1e-13)
    d_re = (F_numeric(s0 + h, 0.0, cfg) - F_numeric(s0 - h, 0.0, cfg)) / (2.0 * h)
    d_im = (F_numeric(s0 + 1j * h, 0.0, cfg) - F_numeric(s0 - 1j * h, 0.0, cfg)) / (2.0 * h)
    return abs(d_im - 1j * d_re)


def second_b_difference(s, h: float = 1e-3, cfg: QuadratureConfig | None = None) -> complex:
    """(F(s, h) - 2 F(s, 0) + F(s, -h)) / h^2, all three by planar quadrature."""
    cfg = cfg or QuadratureConfig(tol=1e-12)
    vals = [F_planar(s, b, cfg).value for b in (h, 0.0, -h)]
    return (vals[0] - 2.0 * vals[1] + vals[2]) / (h * h)


def fact_one_probe(eps: float = 0.5, y_caps=(2.0, 4.0, 16.0, 64.0, 256.0, 1e3, 1e4, 1e5, 1e6),
                   cfg: QuadratureConfig | None = None) -> list[tuple[float, float]]:
    """(y_cap, int_{T0, y <= y_cap} e^{eps d(z, i)} dA) for increasing caps."""
    cfg = cfg or QuadratureConfig(tol=1e-9)

    def f(x, y):
        return np.exp(eps * distance_xy(x, y, 0.0, 1.0))

    out = []
    for cap in y_caps:
        c = QuadratureConfig(tol=cfg.tol, max_depth=cfg.max_depth, y_cap=cap,
                             tail_exponent=-eps, tail_constant=4.0 ** eps)
        out.append((float(cap), integrate_T0(f, c).value.real))
    return out


def fact_one_bound(eps: float = 0.5) -> float:
    return 3.0 * 2.0 * math.exp(eps) / (1.0 - eps)


# ---------------------------------------------------------------------------
# zero scan
# ---------------------------------------------------------------------------

def grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    """lo, lo + step, ... up to hi inclusive; each point computed as lo + k step."""
    if not step > 0:
        raise ValueError("step must be positive")
    if hi < lo:
        return np.empty(0)
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    # rounding keeps decimal steps on their decimal values (-1 + 16 * 0.05 -> -0.2)
    return np.round(lo + step * np.arange(n), 12)


@dataclass
class ZeroScanReport:
    re_range: tuple[float, float]
    im_range: tuple[float, float]
    step: float
    re_values: np.ndarray
    im_values: np.ndarray
    abs_F: np.ndarray  # shape (len(re_values), len(im_values))
    abs_Fbb: np.ndarray
    min_joint: float
    argmin: complex | None
    joint_near_zeros: list[complex] = field(default_factory=list)
    factor_zeros: list[tuple[str, complex, float]] = field(default_factory=list)
    spot_checks: list[tuple[complex, float, float]] = field(default_factory=list)
    rigor_note: str = (
        "finite grid only: the moduli are certified at grid points, not between them"
    )

    @property
    def n_points(self) -> int:
        return int(self.abs_F.size)

    @property
    def spot_check_max(self) -> float:
        return max((max(a, b) for _, a, b in self.spot_checks), default=0.0)

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re_s", "im_s", "abs_F", "abs_Fbb"])
        for i, re in enumerate(self.re_values):
            for j, im in enumerate(self.im_values):
                w.writerow([f"{re:.17g}", f"{im:.17g}", f"{self.abs_F[i, j]:.17g}", f"{self.abs_Fbb[i, j]:.17g}"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _local_minima(a: np.ndarray) -> np.ndarray:
    pad = np.pad(a, 1, constant_values=np.inf)
    core = pad[1:-1, 1:-1]
    mask = np.ones_like(core, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                mask &= core <= pad[1 + di:pad.shape[0] - 1 + di, 1 + dj:pad.shape[1] - 1 + dj]
    return mask


def _spot(s: complex, cfg: QuadratureConfig, fc: complex, fbbc: complex) -> tuple[complex, float, float]:
    dF = abs(F_numeric(s, 0.0, cfg) - fc) / (1.0 + abs(fc))
    dB = abs(F_bb_numeric(s, cfg) - fbbc) / (1.0 + abs(fbbc))
    return s, dF, dB


def wiener_zero_scan(re_range=(-0.9, 3.1), im_range=(-12.0, 12.0), step: float = 0.05,
                     spot_check: bool = True, cfg: QuadratureConfig | None = None) -> ZeroScanReport:
    """Closed-form moduli on a rectangular grid of s, with joint near-zero detection."""
    if not step > 0:
        raise ValueError("step must be positive")
    if not re_range[0] > -1.0:
        raise OutsideP(f"Re(s) range starts at {re_range[0]}, outside Re(s) > -1")
    re_v = grid_axis(*re_range, step)
    im_v = grid_axis(*im_range, step)
    if re_v.size == 0 or im_v.size == 0:
        empty = np.empty((re_v.size, im_v.size))
        return ZeroScanReport(tuple(re_range), tuple(im_range), step, re_v, im_v, empty, empty.copy(),
                              math.inf, None)
    S = re_v[:, None] + 1j * im_v[None, :]
    Fv = F_closed(S)
    Bv = F_bb_closed(S)
    aF, aB = np.abs(Fv), np.abs(Bv)
    joint = np.maximum(aF, aB)
    k = int(np.argmin(joint))  # row-major: ties go to the smallest (Re, Im)
    i, j = divmod(k, im_v.size)
    report = ZeroScanReport(tuple(re_range), tuple(im_range), step, re_v, im_v, aF, aB,
                            float(joint[i, j]), complex(S[i, j]))
    report.joint_near_zeros = [complex(z) for z in S[joint < JOINT_ZERO_TOL]]
    for name, a in (("F", aF), ("F_bb", aB)):
        hits = _local_minima(a) & (a < FACTOR_ZERO_TOL)
        for ii, jj in zip(*np.nonzero(hits)):
            report.factor_zeros.append((name, complex(S[ii, jj]), float(a[ii, jj])))
    if spot_check:
        cfg = cfg or QuadratureConfig(tol=1e-10)
        flat = np.arange(0, S.size, SPOT_CHECK_STRIDE)
        args = [(complex(S.flat[q]), cfg, complex(Fv.flat[q]), complex(Bv.flat[q])) for q in flat]
        with ThreadPoolExecutor(max_workers=worker_count()) as ex:
            report.spot_checks = list(ex.map(lambda a: _spot(*a), args))
    return report
