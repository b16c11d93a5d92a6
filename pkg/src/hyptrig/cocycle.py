"""The boundary cocycle c_f(v0, v1, v2) = signed int_{T(v0, v1, v2)} f dA and its straight analogue."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import NotInvariant
from .functions import FunctionSpec, probe_grid
from .hyperbolic_core import (
    BASEPOINT,
    BoundaryPoint,
    GeodesicTriangle,
    IdealTriple,
    MobiusTransform,
    as_boundary,
    point_along,
    triangle_orientation,
)
from .ideal_transform import config_for
from .quadrature import QuadratureConfig, integrate_geodesic_triangle, integrate_ideal_triangle, worker_count

INVARIANCE_TOL = 1e-9
MIN_VISUAL_GAP = 1e-3


def _triple(t) -> tuple[BoundaryPoint, BoundaryPoint, BoundaryPoint]:
    return tuple(as_boundary(v) for v in t)


def cocycle_value(f: FunctionSpec, t, cfg: QuadratureConfig | None = None) -> float:
    """Signed integral over the ideal triangle, 0 when two vertices coincide.

    Every ordering of one vertex set is integrated through the same sorted
    representative, so alternation holds exactly.
    """
    v0, v1, v2 = _triple(t)
    if v0 == v1 or v1 == v2 or v0 == v2:
        return 0.0
    return integrate_ideal_triangle(f, IdealTriple(v0, v1, v2), config_for(f, cfg)).value.real


def coboundary(f: FunctionSpec, q, cfg: QuadratureConfig | None = None) -> float:
    q0, q1, q2, q3 = _triple(q[:3]) + _triple(q[3:])
    return (cocycle_value(f, (q1, q2, q3), cfg) - cocycle_value(f, (q0, q2, q3), cfg)
            + cocycle_value(f, (q0, q1, q3), cfg) - cocycle_value(f, (q0, q1, q2), cfg))


def coboundary_defect(f: FunctionSpec, q, cfg: QuadratureConfig | None = None) -> float:
    """|delta c_f (q0, q1, q2, q3)|."""
    return abs(coboundary(f, q, cfg))


def straight_cocycle_value(f: FunctionSpec, t: GeodesicTriangle, cfg: QuadratureConfig | None = None) -> float:
    """Orientation sign times the integral over the geodesic triangle; 0 if degenerate."""
    o = triangle_orientation(t)
    if o == 0:
        return 0.0
    return o * integrate_geodesic_triangle(f, t, config_for(f, cfg)).value.real


def pushed_triangle(t, distance: float, center=BASEPOINT) -> GeodesicTriangle:
    """Geodesic triangle of the points at ``distance`` from ``center`` towards each vertex."""
    return GeodesicTriangle(*(point_along(center, v, distance) for v in _triple(t)))


def equivariance_defect(f: FunctionSpec, g: MobiusTransform, t, cfg: QuadratureConfig | None = None) -> float:
    """|c_f(g t) - c_{f o g}(t)|."""
    gt = tuple(g.apply_boundary(v) for v in _triple(t))
    return abs(cocycle_value(f, gt, cfg) - cocycle_value(f.compose(g), t, cfg))


@dataclass(frozen=True)
class IsometrySample:
    elements: tuple[MobiusTransform, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for m in self.elements:
            a, b, c, d = m.coefficients
            if abs(a * d - b * c - 1.0) > 1e-12:
                raise ValueError("isometry sample elements must have determinant 1")


def dilation_words(k: float = 2.0, max_length: int = 3) -> IsometrySample:
    """Words of length 0..max_length in z -> k z and its inverse."""
    return IsometrySample(tuple(MobiusTransform.dilation(k ** n) for n in range(-max_length, max_length + 1)))


def check_invariance(f: FunctionSpec, sample: IsometrySample, tol: float = INVARIANCE_TOL) -> None:
    X, Y = probe_grid()
    base = f(X, Y)
    for g in sample.elements:
        gap = float(np.max(np.abs(f(*g.apply_xy(X, Y)) - base)))
        if gap > tol:
            raise NotInvariant(f"{f.name} moves by {gap:.3e} under {g.coefficients}")


def invariance_defect(f: FunctionSpec, sample: IsometrySample, t, cfg: QuadratureConfig | None = None) -> float:
    """max over g in the sample of |c_f(g t) - c_f(t)|; f must be invariant under the sample."""
    check_invariance(f, sample)
    t = _triple(t)
    ref = cocycle_value(f, t, cfg)
    return max(abs(cocycle_value(f, tuple(g.apply_boundary(v) for v in t), cfg) - ref) for g in sample.elements)


def _visual_gap(a: float, b: float) -> float:
    d = abs(2.0 * math.atan(a) - 2.0 * math.atan(b))
    return min(d, 2.0 * math.pi - d)


def random_quadruples(n: int, seed: int, min_gap: float = MIN_VISUAL_GAP) -> list[tuple[float, ...]]:
    """Quadruples of Cauchy-distributed boundary points, pairwise at least ``min_gap`` apart seen from i."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        q = tuple(float(v) for v in rng.standard_cauchy(4))
        if all(_visual_gap(q[i], q[j]) >= min_gap for i in range(4) for j in range(i + 1, 4)):
            out.append(q)
    return out


@dataclass
class DefectReport:
    seed: int
    n_samples: int
    max_defect: float
    mean_defect: float
    tol: float
    function: str = ""
    defects: list[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("defects")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def coboundary_report(f: FunctionSpec, n_samples: int, seed: int,
                      cfg: QuadratureConfig | None = None,
                      quadruples: Sequence | None = None) -> DefectReport:
    cfg = cfg or QuadratureConfig()
    qs = list(quadruples) if quadruples is not None else random_quadruples(n_samples, seed)
    with ThreadPoolExecutor(max_workers=worker_count()) as ex:
        defects = list(ex.map(lambda q: coboundary_defect(f, q, cfg), qs))
    return DefectReport(seed, len(qs), max(defects, default=0.0),
                        math.fsum(defects) / len(defects) if defects else 0.0, cfg.tol, f.name, defects)
