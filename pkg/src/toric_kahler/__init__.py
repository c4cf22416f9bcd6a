"""Toric Kahler metrics from symplectic potentials in action-angle coordinates.

The package is organized around facet-presented moment polytopes
(:mod:`toric_kahler.polytope`), symplectic potentials on their interiors
(:mod:`toric_kahler.potential`), Calabi's four-parameter radial family of
extremal metrics (:mod:`toric_kahler.calabi`), a general finite-difference
scalar-curvature route used as an independent oracle
(:mod:`toric_kahler.curvature`), the one-variable constant-curvature surface
catalogue (:mod:`toric_kahler.dim2`), and numerical certification of the
positive-definiteness / boundary-determinant conditions
(:mod:`toric_kahler.validate`).

Hot numeric kernels are JIT-compiled with numba when available; set
``TORIC_KAHLER_BACKEND=numpy`` to force the pure-numpy fallback and
``TORIC_KAHLER_THREADS`` to cap worker threads.
"""

from .polytope import Facet, LinearChange, PolyhedralSet, orthant, simplex
from .calabi import (
    Classification,
    PolytopeSpec,
    RadialProfile,
    build_potential,
    classify,
    h_second,
    scalar_curvature_radial,
    solve_parameters,
)
from .potential import (
    CanonicalPotential,
    HessianSample,
    Potential,
    RadialCalabiPotential,
    canonical_potential,
    complex_coordinates,
    radial_inverse_hessian,
    transform_potential,
)
from .curvature import CurvatureReport, cross_validate, scalar_curvature_general, verify_extremal
from .dim2 import Dim2Family, classify_dim2, gauss_curvature_check, potential_dim2
from .validate import ValidationReport, q_positivity, validate_potential

__version__ = "0.1.0"

__all__ = [
    "Facet",
    "LinearChange",
    "PolyhedralSet",
    "orthant",
    "simplex",
    "Classification",
    "PolytopeSpec",
    "RadialProfile",
    "build_potential",
    "classify",
    "h_second",
    "scalar_curvature_radial",
    "solve_parameters",
    "CanonicalPotential",
    "HessianSample",
    "Potential",
    "RadialCalabiPotential",
    "canonical_potential",
    "complex_coordinates",
    "radial_inverse_hessian",
    "transform_potential",
    "CurvatureReport",
    "cross_validate",
    "scalar_curvature_general",
    "verify_extremal",
    "Dim2Family",
    "classify_dim2",
    "gauss_curvature_check",
    "potential_dim2",
    "ValidationReport",
    "q_positivity",
    "validate_potential",
    "__version__",
]
