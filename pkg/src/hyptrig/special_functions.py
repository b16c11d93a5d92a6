"""Complex Gamma function and the Gamma-ratio closed forms of F(s, 0) and its second b-derivative.

``F(s, b) = int_{T0} (y / ((x - b)^2 + y^2))^s dA`` is holomorphic for
Re s > -1.  At b = 0 it and its second b-derivative have closed forms with
removable singularities at s = 1 (and, for the derivative, s = 0).  The
functions here use the pole-free rewriting

    F(s, 0)       = phi(s) sqrt(pi) Gamma((s+1)/2) / Gamma(s/2 + 1)
    F_bb(s, 0)    = 4 sqrt(pi) psi(s) Gamma((s+1)/2) / Gamma(s/2)

with phi(s) = (1 - 2^(1-s)) / (s - 1) and psi(s) = (1 - (s+1) 2^(-s)) / (s - 1),
and ``1/Gamma`` evaluated as an entire function so s = 0 needs no branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import OutsideP, PoleAtNonpositiveInteger

LN2 = math.log(2.0)
SQRT_PI = math.sqrt(math.pi)

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
POLE_TOL = 1e-12


def _as_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _lanczos_log(z: np.ndarray) -> np.ndarray:
    # log Gamma(z) for Re z >= 1/2
    zm = z - 1.0
    acc = np.full_like(zm, _LANCZOS[0])
    for k in range(1, len(_LANCZOS)):
        acc = acc + _LANCZOS[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (zm + 0.5) * np.log(t) - t + np.log(acc)


def _sinpi(z: np.ndarray) -> np.ndarray:
    n = np.round(z.real)
    sign = np.where(np.mod(n, 2.0) == 0.0, 1.0, -1.0)
    return sign * np.sin(math.pi * (z - n))


def _check_poles(z: np.ndarray) -> None:
    near = (z.real <= POLE_TOL) & (np.abs(z - np.round(z.real)) < POLE_TOL)
    if np.any(near):
        bad = z[near].flat[0]
        raise PoleAtNonpositiveInteger(f"Gamma has a pole at {bad}")


def gamma_complex(z):
    """Gamma(z) for complex z (scalar or array); reflection for Re z < 1/2."""
    arr, scalar = _as_array(z)
    _check_poles(arr)
    out = np.empty_like(arr)
    right = arr.real >= 0.5
    if np.any(right):
        out[right] = np.exp(_lanczos_log(arr[right]))
    left = ~right
    if np.any(left):
        zl = arr[left]
        out[left] = math.pi / (_sinpi(zl) * np.exp(_lanczos_log(1.0 - zl)))
    return complex(out) if scalar else out


def rgamma_complex(z):
    """1/Gamma(z); entire, so it returns 0 at the poles of Gamma."""
    arr, scalar = _as_array(z)
    out = np.empty_like(arr)
    right = arr.real >= 0.5
    if np.any(right):
        out[right] = np.exp(-_lanczos_log(arr[right]))
    left = ~right
    if np.any(left):
        zl = arr[left]
        out[left] = _sinpi(zl) * np.exp(_lanczos_log(1.0 - zl)) / math.pi
    return complex(out) if scalar else out


@dataclass(frozen=True)
class SpectralParameter:
    """A point of the half-plane P = {Re s > -1}."""

    s: complex

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        if not self.s.real > -1.0:
            raise OutsideP(f"Re(s) = {self.s.real} is not > -1")

    def __complex__(self):
        return self.s


def _spectral_array(s):
    if isinstance(s, SpectralParameter):
        s = s.s
    arr, scalar = _as_array(s)
    if np.any(~(arr.real > -1.0)):
        raise OutsideP("Re(s) must be > -1")
    return arr, scalar


def _E(x: np.ndarray) -> np.ndarray:
    # (1 - exp(-x)) / x, with the removable point x = 0
    small = np.abs(x) < 1e-3 * LN2
    out = np.empty_like(x)
    xs = x[small]
    out[small] = 1.0 - xs / 2.0 + xs**2 / 6.0 - xs**3 / 24.0 + xs**4 / 120.0
    xl = x[~small]
    out[~small] = -np.expm1(-xl) / xl
    return out


def phi(s):
    """(1 - 2^(1-s)) / (s - 1), equal to log 2 at s = 1."""
    arr, scalar = _as_array(s)
    out = LN2 * _E((arr - 1.0) * LN2)
    return complex(out) if scalar else out


def psi(s):
    """(1 - (s+1) 2^(-s)) / (s - 1), equal to log 2 - 1/2 at s = 1."""
    arr, scalar = _as_array(s)
    x = (arr - 1.0) * LN2
    out = LN2 * _E(x) - 0.5 * np.exp(-x)
    return complex(out) if scalar else out


def F_closed(s):
    """F(s, 0) from the Gamma-ratio closed form; s in P (scalar or array)."""
    arr, scalar = _spectral_array(s)
    out = phi(arr) * SQRT_PI * gamma_complex((arr + 1.0) / 2.0) * rgamma_complex(arr / 2.0 + 1.0)
    return complex(out) if scalar else out


def F_bb_closed(s):
    """Second b-derivative of F(s, b) at b = 0 from the closed form."""
    arr, scalar = _spectral_array(s)
    out = 4.0 * SQRT_PI * psi(arr) * gamma_complex((arr + 1.0) / 2.0) * rgamma_complex(arr / 2.0)
    return complex(out) if scalar else out


def F_literal(s, gamma: Callable = gamma_complex) -> complex:
    """F(s, 0) written with Gamma((s-1)/2); singular at s = 1."""
    s = complex(s)
    return (1.0 - np.exp((1.0 - s) * LN2)) / 2.0 * SQRT_PI * gamma((s - 1.0) / 2.0) / gamma(s / 2.0 + 1.0)


def F_bb_literal(s, gamma: Callable = gamma_complex) -> complex:
    """Second b-derivative with Gamma((s-1)/2)/Gamma(s/2); singular at s = 0 and s = 1."""
    s = complex(s)
    return 2.0 * (1.0 - (s + 1.0) * np.exp(-s * LN2)) * SQRT_PI * gamma((s - 1.0) / 2.0) / gamma(s / 2.0)


# ---------------------------------------------------------------------------
# identity residuals
# ---------------------------------------------------------------------------

def random_gamma_grid(n: int = 500, seed: int = 0, re=(-5.0, 10.0), im=(-5.0, 5.0),
                      margin: float = 0.05) -> np.ndarray:
    """Random points with z, z + 1/2 and 2z all at least ``margin`` away from the poles."""
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        z = complex(rng.uniform(*re), rng.uniform(*im))
        if all(_pole_distance(w) >= margin for w in (z, z + 0.5, 2.0 * z, z + 1.0)):
            pts.append(z)
    return np.array(pts)


def _pole_distance(z: complex) -> float:
    n = min(0.0, round(z.real))
    return abs(z - n)


def functional_equation_residual(z: np.ndarray, gamma: Callable = gamma_complex) -> float:
    g0 = gamma(z)
    g1 = gamma(z + 1.0)
    return float(np.max(np.abs(g1 - z * g0) / np.abs(g1)))


def duplication_residual(z: np.ndarray, gamma: Callable = gamma_complex) -> float:
    lhs = gamma(z) * gamma(z + 0.5)
    g2 = gamma(2.0 * z)
    rhs = np.exp((1.0 - 2.0 * z) * LN2) * SQRT_PI * g2
    return float(np.max(np.abs(lhs - rhs) / np.abs(g2)))


def beta_integral(s1: float, s2: float) -> float:
    """int_0^{pi/2} sin^s1 cos^s2 d(theta) by algebraic-weight quadrature."""
    from scipy.integrate import quad

    half = 0.5 * math.pi

    def smooth(t):
        u = half - t
        a = math.sin(t) / t if t > 0 else 1.0
        b = math.sin(u) / u if u > 0 else 1.0
        return a**s1 * b**s2

    val, _ = quad(smooth, 0.0, half, weight="alg", wvar=(s1, s2), epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def beta_closed(s1: float, s2: float, gamma: Callable = gamma_complex) -> float:
    num = gamma((s1 + 1.0) / 2.0) * gamma((s2 + 1.0) / 2.0)
    return float((num / (2.0 * gamma((s1 + s2) / 2.0 + 1.0))).real)


def beta_grid(n: int = 40, seed: int = 0) -> list[tuple[float, float]]:
    rng = np.random.default_rng(seed)
    return [(float(a), float(b)) for a, b in rng.uniform(-0.9, 4.0, size=(n, 2))]


def beta_residual(pairs, gamma: Callable = gamma_complex) -> float:
    return max(abs(beta_integral(a, b) - beta_closed(a, b, gamma)) for a, b in pairs)


def literal_agreement_residual(points, gamma: Callable = gamma_complex) -> float:
    """Largest relative gap between the pole-free and literal closed forms."""
    worst = 0.0
    for s in points:
        s = complex(s)
        if abs(s - 1.0) <= 0.1 or abs(s) <= 0.1:
            continue
        for closed, literal in ((F_closed, F_literal), (F_bb_closed, F_bb_literal)):
            a = closed(s)
            b = literal(s, gamma)
            worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return worst


IDENTITY_BOUNDS = {
    "functional_equation": 1e-10,
    "legendre_duplication": 1e-9,
    "beta": 1e-8,
    "pole_free_agreement": 1e-10,
}


def identity_suite(seed: int = 0, gamma: Callable = gamma_complex) -> list[dict]:
    """Residual of each Gamma identity, as rows {identity, residual, bound}."""
    z = random_gamma_grid(seed=seed)
    rng = np.random.default_rng(seed + 1)
    s_pts = rng.uniform(-0.9, 4.0, 60) + 1j * rng.uniform(-10.0, 10.0, 60)
    residuals = {
        "functional_equation": functional_equation_residual(z, gamma),
        "legendre_duplication": duplication_residual(z, gamma),
        "beta": beta_residual(beta_grid(seed=seed), gamma),
        "pole_free_agreement": literal_agreement_residual(s_pts, gamma),
    }
    return [{"identity": k, "residual": residuals[k], "bound": IDENTITY_BOUNDS[k]} for k in IDENTITY_BOUNDS]
