"""Exact-formula geometry of the upper half-plane model.

Points are ``x + iy`` with ``y > 0``; the basepoint is ``i``.  The ideal
boundary is R together with a tagged point at infinity, and orientation
preserving isometries are real Mobius maps normalized to determinant one.

All array helpers (``*_xy``) take and return numpy arrays so the quadrature
code can evaluate whole batches of nodes at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DegenerateTriangle, NegativelyOriented, SingularTransform

DET_TOL = 1e-14
POLE_ULPS = 8.0 * 2.0 ** -52


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (self.y > 0.0 and math.isfinite(self.y) and math.isfinite(self.x)):
            raise ValueError(f"point ({self.x}, {self.y}) is not in the upper half-plane")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "Point":
        return cls(float(z.real), float(z.imag))


BASEPOINT = Point(0.0, 1.0)


@dataclass(frozen=True)
class BoundaryPoint:
    """Element of R u {oo}.  ``value is None`` is the point at infinity."""

    value: float | None = None

    def __post_init__(self):
        if self.value is not None:
            v = float(self.value)
            if not math.isfinite(v):
                raise ValueError("finite boundary points need a finite value; use BoundaryPoint.infinity()")
            object.__setattr__(self, "value", v)

    @classmethod
    def finite(cls, v: float) -> "BoundaryPoint":
        return cls(float(v))

    @classmethod
    def infinity(cls) -> "BoundaryPoint":
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def sort_key(self) -> tuple[int, float]:
        return (1, 0.0) if self.value is None else (0, self.value)

    def __repr__(self) -> str:
        return "BoundaryPoint(oo)" if self.value is None else f"BoundaryPoint({self.value!r})"


INFINITY = BoundaryPoint.infinity()


def as_boundary(v) -> BoundaryPoint:
    """Coerce a float (``math.inf`` meaning oo) or BoundaryPoint."""
    if isinstance(v, BoundaryPoint):
        return v
    v = float(v)
    if math.isinf(v):
        return INFINITY
    return BoundaryPoint(v)


@dataclass(frozen=True)
class MobiusTransform:
    """z -> (az + b)/(cz + d), stored with ad - bc = 1."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if abs(det) < DET_TOL:
            raise SingularTransform(f"determinant {det!r} is numerically zero")
        if det < 0:
            raise SingularTransform("negative determinant: map reverses orientation")
        r = math.sqrt(det)
        for name in "abcd":
            object.__setattr__(self, name, float(getattr(self, name)) / r)

    @classmethod
    def identity(cls) -> "MobiusTransform":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def dilation(cls, k: float) -> "MobiusTransform":
        return cls(k, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, t: float) -> "MobiusTransform":
        return cls(1.0, t, 0.0, 1.0)

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "MobiusTransform") -> "MobiusTransform":
        a, b, c, d = self.coefficients
        e, f, g, h = other.coefficients
        return MobiusTransform(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a)

    def apply_xy(self, x, y):
        """Image of the points x + iy, returned as (X, Y) arrays.

        Uses Im(gz) = y/|cz+d|^2 so that heights near the boundary keep full
        relative precision.
        """
        a, b, c, d = self.coefficients
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        p = c * x + d
        q = c * y
        den = p * p + q * q
        return ((a * x + b) * p + a * c * y * y) / den, y / den

    def __call__(self, z: Point) -> Point:
        X, Y = self.apply_xy(z.x, z.y)
        return Point(float(X), float(Y))

    def apply_boundary(self, v: BoundaryPoint) -> BoundaryPoint:
        a, b, c, d = self.coefficients
        if v.is_infinity:
            return INFINITY if c == 0.0 else BoundaryPoint(a / c)
        den = c * v.value + d
        # a pole at rounding level: cv + d cancels to within a few ulps
        if abs(den) <= POLE_ULPS * (abs(c * v.value) + abs(d)):
            return INFINITY
        return BoundaryPoint((a * v.value + b) / den)

    def distance_to(self, other: "MobiusTransform") -> float:
        """Coefficient distance up to the sign ambiguity of PSL(2, R)."""
        p = np.array(self.coefficients)
        q = np.array(other.coefficients)
        return float(min(np.linalg.norm(p - q), np.linalg.norm(p + q)))


def mobius_apply(m: MobiusTransform, z: Point) -> Point:
    return m(z)


def mobius_apply_boundary(m: MobiusTransform, b: BoundaryPoint) -> BoundaryPoint:
    return m.apply_boundary(b)


def compose(m1: MobiusTransform, m2: MobiusTransform) -> MobiusTransform:
    """The map z -> m1(m2(z))."""
    return m1 @ m2


def hyperbolic_distance(z: Point, w: Point) -> float:
    # 2 asinh form; equal to arccosh(1 + |z-w|^2/(2 y_z y_w)) but stable for close points
    return 2.0 * math.asinh(math.hypot(z.x - w.x, z.y - w.y) / (2.0 * math.sqrt(z.y * w.y)))


def distance_xy(x, y, x0: float, y0: float):
    return 2.0 * np.arcsinh(np.hypot(x - x0, y - y0) / (2.0 * np.sqrt(y * y0)))


def busemann(z: Point, b: BoundaryPoint) -> float:
    """Busemann function <z, b> based at i."""
    return float(busemann_xy(z.x, z.y, b))


def busemann_xy(x, y, b: BoundaryPoint):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if b.is_infinity:
        return np.log(y)
    v = b.value
    return np.log((v * v + 1.0) * y / ((x - v) ** 2 + y * y))


def orientation(u: BoundaryPoint, v: BoundaryPoint, w: BoundaryPoint) -> int:
    """+1 if (u, v, w) is in increasing cyclic order on R u {oo}, -1 otherwise, 0 if two coincide."""
    if u == v or v == w or u == w:
        return 0
    pts = [u, v, w]
    if any(p.is_infinity for p in pts):
        # cyclic rotation keeps the orientation; bring oo to the last slot
        k = next(i for i, p in enumerate(pts) if p.is_infinity)
        p, q = pts[(k + 1) % 3], pts[(k + 2) % 3]
        return 1 if p.value < q.value else -1
    prod = (v.value - u.value) * (w.value - v.value) * (u.value - w.value)
    return 1 if prod < 0 else -1


@dataclass(frozen=True)
class IdealTriple:
    v0: BoundaryPoint
    v1: BoundaryPoint
    v2: BoundaryPoint
    orientation: int = field(init=False)

    def __post_init__(self):
        vs = [as_boundary(v) for v in (self.v0, self.v1, self.v2)]
        for name, v in zip(("v0", "v1", "v2"), vs):
            object.__setattr__(self, name, v)
        o = orientation(*vs)
        if o == 0:
            raise ValueError(f"ideal triple has repeated vertices: {vs}")
        object.__setattr__(self, "orientation", o)

    @property
    def vertices(self) -> tuple[BoundaryPoint, BoundaryPoint, BoundaryPoint]:
        return (self.v0, self.v1, self.v2)

    def image(self, m: MobiusTransform) -> "IdealTriple":
        return IdealTriple(*(m.apply_boundary(v) for v in self.vertices))


STANDARD_TRIPLE = IdealTriple(BoundaryPoint(-1.0), BoundaryPoint(1.0), INFINITY)


def _permutation_sign(perm: Iterable[int]) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def canonical_triple(v0, v1, v2) -> tuple[int, IdealTriple]:
    """Sort three distinct boundary points increasingly (oo last).

    Returns ``(sign, triple)`` where ``sign`` is the parity of the sorting
    permutation, so that the input is ``sign`` times the positively oriented
    ``triple`` as an oriented ideal triangle.
    """
    vs = [as_boundary(v) for v in (v0, v1, v2)]
    perm = sorted(range(3), key=lambda i: vs[i].sort_key())
    t = IdealTriple(*(vs[i] for i in perm))
    assert t.orientation == 1
    return _permutation_sign(perm), t


def mobius_to_standard_triple(t: IdealTriple) -> MobiusTransform:
    """The unique isometry sending (v0, v1, v2) to (-1, 1, oo)."""
    if t.orientation != 1:
        raise NegativelyOriented("triple is negatively oriented; swap two vertices and track the sign")
    u, v, w = t.vertices
    # cross-ratio map u -> 0, v -> 1, w -> oo
    if w.is_infinity:
        a, b, c, d = 1.0, -u.value, 0.0, v.value - u.value
    elif u.is_infinity:
        a, b, c, d = 0.0, v.value - w.value, 1.0, -w.value
    elif v.is_infinity:
        a, b, c, d = 1.0, -u.value, 1.0, -w.value
    else:
        a, b = v.value - w.value, -u.value * (v.value - w.value)
        c, d = v.value - u.value, -w.value * (v.value - u.value)
    return MobiusTransform(2.0, -1.0, 0.0, 1.0) @ MobiusTransform(a, b, c, d)


@dataclass(frozen=True)
class GeodesicTriangle:
    p0: Point
    p1: Point
    p2: Point

    @property
    def vertices(self) -> tuple[Point, Point, Point]:
        return (self.p0, self.p1, self.p2)


def _direction(p: Point, q: Point) -> complex:
    """Unit tangent at p of the geodesic towards q.

    Moves p to i by a real affine map (conformal), then reads the direction
    off the Cayley disk image of q: the differential of the Cayley map at i
    is multiplication by -i/2.
    """
    w = complex((q.x - p.x) / p.y, q.y / p.y)
    disk = (w - 1j) / (w + 1j)
    t = 1j * disk
    return t / abs(t)


def signed_angle(p: Point, q: Point, r: Point) -> float:
    """Angle at p from the direction of q to the direction of r, in (-pi, pi]."""
    tq = _direction(p, q)
    tr = _direction(p, r)
    return math.atan2((tr * tq.conjugate()).imag, (tr * tq.conjugate()).real)


ANGLE_TOL = 1e-10


def triangle_angles(t: GeodesicTriangle) -> tuple[float, float, float]:
    """Interior angles at p0, p1, p2."""
    p0, p1, p2 = t.vertices
    for a, b in ((p0, p1), (p1, p2), (p0, p2)):
        if hyperbolic_distance(a, b) < 1e-12:
            raise DegenerateTriangle("two vertices coincide")
    angles = (
        abs(signed_angle(p0, p1, p2)),
        abs(signed_angle(p1, p2, p0)),
        abs(signed_angle(p2, p0, p1)),
    )
    if max(angles) > math.pi - ANGLE_TOL or sum(angles) > math.pi - ANGLE_TOL:
        raise DegenerateTriangle("vertices lie on one geodesic")
    return angles


def triangle_orientation(t: GeodesicTriangle) -> int:
    """+1 if p0 -> p1 -> p2 runs counterclockwise, -1 if clockwise, 0 if degenerate."""
    p0, p1, p2 = t.vertices
    if p0 == p1 or p1 == p2 or p0 == p2:
        return 0
    a = signed_angle(p0, p1, p2)
    if abs(a) < ANGLE_TOL or abs(a) > math.pi - ANGLE_TOL:
        return 0
    return 1 if a > 0 else -1


def point_along(p: Point, q: BoundaryPoint | Point, distance: float) -> Point:
    """Point at hyperbolic ``distance`` from p on the geodesic ray towards q."""
    # move p to i, q to oo, walk up the imaginary axis, move back
    to_i = MobiusTransform(1.0 / p.y, -p.x / p.y, 0.0, 1.0)
    if isinstance(q, Point):
        q_img = to_i(q)
        w = complex(q_img.x, q_img.y)
    else:
        q_img = to_i.apply_boundary(q)
        if q_img.is_infinity:
            return to_i.inverse()(Point(0.0, math.exp(distance)))
        w = complex(q_img.value, 0.0)
    # rotation about i taking the direction of w to the upward direction
    disk = (w - 1j) / (w + 1j)
    ang = math.atan2(disk.imag, disk.real)
    # [[cos t, sin t], [-sin t, cos t]] fixes i and turns tangent directions there by 2t;
    # the direction towards w is i*disk, at angle ang + pi/2
    th = -ang / 2.0
    rot = MobiusTransform(math.cos(th), math.sin(th), -math.sin(th), math.cos(th))
    up = Point(0.0, math.exp(distance))
    return (to_i.inverse() @ rot.inverse())(up)
