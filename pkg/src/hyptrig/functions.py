"""Catalog of bounded test functions on the upper half-plane.

A ``FunctionSpec`` is a vectorized callable f(x, y) together with a bound on
|f| that is probed at construction.  ``decay_exponent`` alpha (when set)
promises |f| <= sup_norm * min(y, 1/y)^alpha on the standard triangle; 0 is
right for every bounded function.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import UnsupportedFunction
from .hyperbolic_core import (
    IdealTriple,
    MobiusTransform,
    as_boundary,
    busemann_xy,
    canonical_triple,
    distance_xy,
    mobius_to_standard_triple,
)

PROBE_X = np.linspace(-10.0, 10.0, 100)
PROBE_Y = np.logspace(-3.0, 3.0, 100)


def probe_grid() -> tuple[np.ndarray, np.ndarray]:
    return np.meshgrid(PROBE_X, PROBE_Y, indexing="ij")


class FunctionKind(enum.Enum):
    CONSTANT = "constant"
    ODD_IN_X = "odd_in_x"
    DILATION_INVARIANT = "dilation_invariant"
    GAUSSIAN_BUMP = "gaussian_bump"
    PLANE_WAVE_REAL_PART = "plane_wave_real_part"
    CUSTOM = "custom"


def _in_ideal_triangle(x, y, t: IdealTriple):
    _, canon = canonical_triple(*t.vertices)
    X, Y = mobius_to_standard_triple(canon).apply_xy(x, y)
    return (np.abs(X) < 1.0) & (X * X + Y * Y > 1.0)


@dataclass(frozen=True)
class FunctionSpec:
    kind: FunctionKind
    params: tuple[float, ...]
    sup_norm: float
    decay_exponent: float | None = 0.0
    func: Callable = field(default=None, compare=False, repr=False)
    support: IdealTriple | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.func is None:
            object.__setattr__(self, "func", _builder(self.kind)(*self.params))
        if not self.name:
            object.__setattr__(self, "name", self.kind.value)
        if not self.sup_norm >= 0:
            raise ValueError("sup_norm must be nonnegative")
        X, Y = probe_grid()
        peak = float(np.max(np.abs(self(X, Y))))
        if peak > self.sup_norm * (1.0 + 1e-12) + 1e-300:
            raise ValueError(f"{self.name}: probe maximum {peak} exceeds sup_norm {self.sup_norm}")

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = self.func(x, y)
        out = np.broadcast_to(out, np.broadcast(x, y).shape)
        if self.support is not None:
            out = np.where(_in_ideal_triangle(x, y, self.support), out, 0.0)
        return out

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.func(np.array([0.0]), np.array([1.0])))

    def compose(self, m: MobiusTransform) -> "FunctionSpec":
        """f o m."""
        f = self.func

        def g(x, y):
            return f(*m.apply_xy(x, y))

        support = None if self.support is None else self.support.image(m.inverse())
        # composition preserves boundedness but not the decay profile on T0
        decay = self.decay_exponent if self.decay_exponent == 0.0 else None
        return FunctionSpec(FunctionKind.CUSTOM, (), self.sup_norm, decay, g, support,
                            f"{self.name}o{m.coefficients}")

    def restrict(self, t: IdealTriple) -> "FunctionSpec":
        """f times the indicator of the ideal triangle spanned by ``t``."""
        if self.support is not None:
            raise ValueError("function already has a support triangle")
        return FunctionSpec(self.kind, self.params, self.sup_norm, self.decay_exponent,
                            self.func, t, f"{self.name}|T")


def linear_combination(alpha: float, f1: FunctionSpec, beta: float, f2: FunctionSpec) -> FunctionSpec:
    if f1.support != f2.support:
        raise ValueError("combined functions must share a support")
    a, b = f1.func, f2.func
    decay = None
    if f1.decay_exponent is not None and f2.decay_exponent is not None:
        decay = min(f1.decay_exponent, f2.decay_exponent)
    return FunctionSpec(FunctionKind.CUSTOM, (alpha, beta),
                        abs(alpha) * f1.sup_norm + abs(beta) * f2.sup_norm, decay,
                        lambda x, y: alpha * a(x, y) + beta * b(x, y), f1.support,
                        f"{alpha}*{f1.name}+{beta}*{f2.name}")


def _constant(c=1.0):
    return lambda x, y: np.full(np.broadcast(x, y).shape, c)


def _odd_in_x(a=1.0):
    return lambda x, y: np.tanh(a * x) + 0.0 * y


def _dilation_invariant(k=1.0):
    return lambda x, y: 1.0 / (1.0 + (k * x / y) ** 2)


def _gaussian_bump(x0=0.3, y0=1.5, sigma=0.7):
    return lambda x, y: np.exp(-((distance_xy(x, y, x0, y0) / sigma) ** 2))


def _plane_wave_re(lam=1.0, b=math.inf):
    bp = as_boundary(b)
    # cos(lam <z, b>): with the real-frequency modulus e^<z,b> stripped off
    return lambda x, y: np.cos(lam * busemann_xy(x, y, bp))


def _custom(*_):
    raise ValueError("custom functions need an explicit callable")


_BUILDERS = {
    FunctionKind.CONSTANT: _constant,
    FunctionKind.ODD_IN_X: _odd_in_x,
    FunctionKind.DILATION_INVARIANT: _dilation_invariant,
    FunctionKind.GAUSSIAN_BUMP: _gaussian_bump,
    FunctionKind.PLANE_WAVE_REAL_PART: _plane_wave_re,
    FunctionKind.CUSTOM: _custom,
}


def _builder(kind: FunctionKind):
    return _BUILDERS[kind]


def constant(c: float = 1.0) -> FunctionSpec:
    return FunctionSpec(FunctionKind.CONSTANT, (c,), abs(c))


def odd_in_x(a: float = 1.0) -> FunctionSpec:
    """tanh(a x)."""
    return FunctionSpec(FunctionKind.ODD_IN_X, (a,), 1.0)


def dilation_invariant(k: float = 1.0) -> FunctionSpec:
    """1 / (1 + (k x / y)^2), invariant under z -> t z for t > 0."""
    return FunctionSpec(FunctionKind.DILATION_INVARIANT, (k,), 1.0)


def gaussian_bump(x0: float = 0.3, y0: float = 1.5, sigma: float = 0.7) -> FunctionSpec:
    """exp(-(d(z, z0) / sigma)^2)."""
    return FunctionSpec(FunctionKind.GAUSSIAN_BUMP, (x0, y0, sigma), 1.0)


def plane_wave_real_part(lam: float = 1.0, b: float = math.inf) -> FunctionSpec:
    """cos(lam <z, b>); ``b = inf`` means the boundary point at infinity."""
    return FunctionSpec(FunctionKind.PLANE_WAVE_REAL_PART, (lam, b), 1.0)


def custom(func: Callable, sup_norm: float, decay_exponent: float | None = None,
           name: str = "custom") -> FunctionSpec:
    return FunctionSpec(FunctionKind.CUSTOM, (), sup_norm, decay_exponent, func, None, name)


def indicator(t: IdealTriple) -> FunctionSpec:
    """Indicator of the ideal triangle spanned by ``t``."""
    return constant(1.0).restrict(t)


CATALOG: dict[str, Callable[..., FunctionSpec]] = {
    "constant": constant,
    "odd_in_x": odd_in_x,
    "dilation_invariant": dilation_invariant,
    "gaussian_bump": gaussian_bump,
    "plane_wave_real_part": plane_wave_real_part,
}


def catalog_functions() -> list[FunctionSpec]:
    """One instance of every catalog kind with default parameters."""
    return [make() for make in CATALOG.values()]


def by_name(name: str, params=()) -> FunctionSpec:
    try:
        make = CATALOG[name]
    except KeyError:
        raise UnsupportedFunction(f"unknown function {name!r}; choose from {sorted(CATALOG)}") from None
    return make(*params)
