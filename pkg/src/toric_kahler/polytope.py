"""Facet-presented polyhedral sets and linear changes of action coordinates.

A set is stored as the list of its facet data (inward normal, offset), with
the affine defining functions

    l_i(x) = <x, normal_i> + offset_i

positive exactly on the interior.  Normals may be non-primitive rationals:
scaling a normal by 1/m encodes an integer label m on that facet, which is how
labeled (orbifold) sets are represented here.  Offsets always enter with a
plus sign; that single convention is used everywhere in the package.

Only the facet presentation is kept.  There is no vertex enumeration and no
smoothness verification -- unbounded sets are first-class, and the only
structural requirement is a nonempty interior.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isfinite, sqrt

from .rational import (
    SingularMatrixError,
    all_rational,
    det_exact,
    format_rational,
    invert_exact,
    parse_rational,
)


class DomainError(ValueError):
    """A point is outside (or too close to the boundary of) the domain."""


def _as_fraction_vector(values):
    return tuple(parse_rational(v) for v in values)


@dataclass(frozen=True)
class Facet:
    """One facet: inward normal and offset of l(x) = <x, normal> + offset."""

    normal: tuple
    offset: Fraction

    def __init__(self, normal, offset):
        normal = _as_fraction_vector(normal)
        if all(v == 0 for v in normal):
            raise ValueError("facet normal must be nonzero")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", parse_rational(offset))

    def value(self, x):
        """l(x), exact when both the facet and x are rational."""
        if len(x) != len(self.normal):
            raise DomainError(f"point has length {len(x)}, facet normal {len(self.normal)}")
        return sum(nu * xi for nu, xi in zip(self.normal, x)) + self.offset

    def norm(self) -> float:
        return sqrt(sum(float(v) * float(v) for v in self.normal))


@dataclass(frozen=True)
class PolyhedralSet:
    """A simple polyhedral set presented by facets; may be unbounded."""

    dim: int
    facets: tuple

    def __init__(self, dim, facets):
        dim = int(dim)
        if dim < 1:
            raise ValueError("dimension must be a positive integer")
        facets = tuple(facets)
        for f in facets:
            if len(f.normal) != dim:
                raise ValueError("all facet normals must have length dim")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "facets", facets)


def affine_values(P: PolyhedralSet, x):
    """All l_i(x) in facet order."""
    if len(x) != P.dim:
        raise DomainError(f"point has length {len(x)}, expected {P.dim}")
    return [f.value(x) for f in P.facets]


def contains_interior(P: PolyhedralSet, x, margin=0) -> bool:
    """True iff l_i(x) > margin for every facet."""
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    return all(v > margin for v in affine_values(P, x))


def boundary_margin(P: PolyhedralSet, x) -> float:
    """Euclidean distance proxy: min_i l_i(x) / |normal_i| (inf if no facets)."""
    values = affine_values(P, x)
    if not values:
        return float("inf")
    return min(float(v) / f.norm() for v, f in zip(values, P.facets))


@dataclass(frozen=True)
class LinearChange:
    """An invertible linear map T of the action coordinates."""

    matrix: tuple

    def __init__(self, matrix):
        rows = tuple(_as_fraction_vector(row) for row in matrix)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "matrix", rows)
        if det_exact(rows) == 0:
            raise SingularMatrixError("linear change must be invertible")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def determinant(self) -> Fraction:
        return det_exact(self.matrix)

    def apply(self, x):
        """T x."""
        if len(x) != self.dim:
            raise DomainError("dimension mismatch")
        return tuple(sum(a * xi for a, xi in zip(row, x)) for row in self.matrix)

    def apply_transpose(self, v):
        """T^t v (how inward normals transform)."""
        if len(v) != self.dim:
            raise DomainError("dimension mismatch")
        n = self.dim
        return tuple(sum(self.matrix[i][j] * v[i] for i in range(n)) for j in range(n))

    def inverse(self) -> "LinearChange":
        return LinearChange(invert_exact(self.matrix))

    def compose(self, other: "LinearChange") -> "LinearChange":
        """Matrix product self . other."""
        n = self.dim
        if other.dim != n:
            raise ValueError("dimension mismatch")
        prod = [
            [sum(self.matrix[i][k] * other.matrix[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]
        return LinearChange(prod)


def transform(P: PolyhedralSet, T: LinearChange) -> PolyhedralSet:
    """The preimage T^{-1}(P): normals map by T^t, offsets are unchanged.

    The defining functions satisfy l'_i(x) = l_i(Tx), so x lies in the new set
    exactly when Tx lies in P.  Rational data stays exactly rational.
    """
    if T.dim != P.dim:
        raise ValueError("transform dimension mismatch")
    return PolyhedralSet(
        P.dim, [Facet(T.apply_transpose(f.normal), f.offset) for f in P.facets]
    )


@lru_cache(maxsize=None)
def chebyshev_center(P: PolyhedralSet):
    """Max-margin interior witness inside a probe box: (point, margin).

    Solves  max t  s.t.  <nu_i, x> + offset_i >= t * |nu_i|,  |x_j| <= R
    with a probe radius R set by the offset scale.  Any positive-margin
    witness would do; the max-margin one keeps samplers away from facets.
    """
    import numpy as np
    from scipy.optimize import linprog

    n = P.dim
    if not P.facets:
        return (0.0,) * n, float("inf")
    offset_scale = max(abs(float(f.offset)) / f.norm() for f in P.facets)
    radius = 10.0 * (1.0 + offset_scale)
    a_ub = []
    b_ub = []
    for f in P.facets:
        a_ub.append([-float(v) for v in f.normal] + [f.norm()])
        b_ub.append(float(f.offset))
    c = [0.0] * n + [-1.0]
    bounds = [(-radius, radius)] * n + [(None, None)]
    res = linprog(c, A_ub=np.array(a_ub), b_ub=np.array(b_ub), bounds=bounds, method="highs")
    if not res.success or res.x is None:
        raise DomainError("no interior witness found (empty interior?)")
    t = float(res.x[n])
    if not (t > 0) or not isfinite(t):
        raise DomainError("polyhedral set has empty interior")
    return tuple(float(v) for v in res.x[:n]), t


def interior_point(P: PolyhedralSet):
    """Some strictly interior point (the cached max-margin witness)."""
    return chebyshev_center(P)[0]


@lru_cache(maxsize=None)
def coordinate_extents(P: PolyhedralSet):
    """Per-coordinate (min, max) over P intersected with the probe box.

    Used to build sampling boxes; for unbounded directions the probe box
    radius acts as the cap.
    """
    import numpy as np
    from scipy.optimize import linprog

    n = P.dim
    witness = interior_point(P)
    if not P.facets:
        return tuple((w - 1.0, w + 1.0) for w in witness)
    offset_scale = max(abs(float(f.offset)) / f.norm() for f in P.facets)
    radius = 10.0 * (1.0 + offset_scale)
    a_ub = np.array([[-float(v) for v in f.normal] for f in P.facets])
    b_ub = np.array([float(f.offset) for f in P.facets])
    bounds = [(-radius, radius)] * n
    extents = []
    for j in range(n):
        lo_hi = []
        for sign in (1.0, -1.0):
            c = [0.0] * n
            c[j] = sign
            res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
            if not res.success:
                raise DomainError("extent LP failed")
            lo_hi.append(float(res.x[j]))
        extents.append((min(lo_hi), max(lo_hi)))
    return tuple(extents)


def orthant(n: int) -> PolyhedralSet:
    """The positive orthant: l_i(x) = x_i."""
    facets = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        facets.append(Facet(e, 0))
    return PolyhedralSet(n, facets)


def simplex(n: int, scale=1) -> PolyhedralSet:
    """The standard simplex: l_i = x_i for i <= n and l_{n+1} = scale - sum x_i."""
    scale = parse_rational(scale)
    if scale <= 0:
        raise ValueError("simplex scale must be positive")
    facets = list(orthant(n).facets)
    facets.append(Facet([-1] * n, scale))
    return PolyhedralSet(n, facets)


def interval(lo=None, hi=None) -> PolyhedralSet:
    """A 1-d set: [lo, hi], a half line, or all of R when both ends are open."""
    facets = []
    if lo is not None:
        facets.append(Facet([1], -parse_rational(lo)))
    if hi is not None:
        facets.append(Facet([-1], parse_rational(hi)))
    if lo is not None and hi is not None and parse_rational(lo) >= parse_rational(hi):
        raise ValueError("interval needs lo < hi")
    return PolyhedralSet(1, facets)


def to_json_dict(P: PolyhedralSet) -> dict:
    return {
        "dim": P.dim,
        "facets": [
            {"normal": [format_rational(v) for v in f.normal], "offset": format_rational(f.offset)}
            for f in P.facets
        ],
    }


def from_json_dict(data: dict) -> PolyhedralSet:
    try:
        dim = int(data["dim"])
        facets = [Facet(f["normal"], f["offset"]) for f in data["facets"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed polyhedral set document: {exc}") from None
    return PolyhedralSet(dim, facets)


def from_json(text: str) -> PolyhedralSet:
    return from_json_dict(json.loads(text))


def exact_facets_equal(P: PolyhedralSet, Q: PolyhedralSet) -> bool:
    """Facet-wise exact rational equality (order-sensitive)."""
    return (
        P.dim == Q.dim
        and len(P.facets) == len(Q.facets)
        and all(
            fp.normal == fq.normal and fp.offset == fq.offset
            for fp, fq in zip(P.facets, Q.facets)
        )
    )


def hirzebruch_change(m: int) -> LinearChange:
    """The 2x2 change [[m, -1], [0, 1]] relating the two Hirzebruch pictures."""
    if m < 1:
        raise ValueError("twisting m must be a positive integer")
    return LinearChange([[m, -1], [0, 1]])
