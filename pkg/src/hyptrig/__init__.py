"""Integrals over ideal hyperbolic triangles in the upper half-plane.

The subpackages cover the geometry of the half-plane, adaptive quadrature
for dA = dx dy / y^2 on unbounded triangles, the complex Gamma function and
Gamma-ratio closed forms, the Helgason-Fourier transform of a triangle
indicator, the ideal triangle transform, and the boundary cocycle.
"""

from .errors import HyptrigError
from .hyperbolic_core import (
    BASEPOINT,
    INFINITY,
    STANDARD_TRIPLE,
    BoundaryPoint,
    GeodesicTriangle,
    IdealTriple,
    MobiusTransform,
    Point,
    busemann,
    hyperbolic_distance,
    mobius_to_standard_triple,
    triangle_angles,
)
from .quadrature import (
    IntegralResult,
    QuadratureConfig,
    integrate_geodesic_triangle,
    integrate_ideal_triangle,
    integrate_T0,
)
from .special_functions import F_bb_closed, F_closed, SpectralParameter, gamma_complex

__version__ = "0.1.0"
