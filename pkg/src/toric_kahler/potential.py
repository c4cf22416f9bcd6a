"""Symplectic potentials on polytope interiors.

A potential s determines the metric through its Hessian S = Hess s: the
metric splits as diag(S, S^{-1}) in action-angle coordinates.  This module
holds the potential variants (canonical log potential, radial family on
top of the flat orthant part, polynomial corrections, sums, and linear
pullbacks), generic evaluation of s / grad s / S with closed-form
derivatives, the closed-form radial inverse Hessian, and holomorphic
coordinates z = grad s + i y.

Derivative evaluation requires strictly interior points.  Values extend
continuously to facets through 0 log 0 := 0 (plotting convenience only).

Batch Hessian assembly routes through the backend kernels (numba or
numpy, see backend.py); batch calls skip per-point interiority checks and
are meant for samplers that only produce safe interior stencils.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .backend import kernels
from .calabi import (
    PoleError,
    RadialProfile,
    f_value,
    first_pole_beyond,
    h_closed_form,
    h_second,
    one_plus_r_h_second,
    profile_from_json_dict,
    profile_to_json_dict,
    q_coefficients,
)
from .polytope import (
    DomainError,
    Facet,
    LinearChange,
    PolyhedralSet,
    interior_point,
    transform,
)
from .polytope import from_json_dict as polytope_from_json_dict
from .polytope import to_json_dict as polytope_to_json_dict
from .rational import format_rational, parse_rational

TOL_LINALG = 1e-10


@dataclass(frozen=True, eq=False)
class HessianSample:
    """One metric sample: S, its inverse, and Det S at an interior point."""

    point: tuple
    S: np.ndarray
    S_inv: np.ndarray
    det_S: float


def _facet_arrays(P: PolyhedralSet):
    normals = np.array([[float(c) for c in f.normal] for f in P.facets], dtype=float)
    offsets = np.array([float(f.offset) for f in P.facets], dtype=float)
    if len(P.facets) == 0:
        normals = np.zeros((0, P.dim))
        offsets = np.zeros(0)
    return normals, offsets


class Potential:
    """Base for all symplectic potentials.

    Subclasses fill in value/gradient/hessian_matrix with closed-form
    derivatives.  The base provides point validation, the inverse-carrying
    hessian() sample, and the batch fallback.
    """

    _domain: PolyhedralSet

    @property
    def domain(self) -> PolyhedralSet:
        return self._domain

    @property
    def dim(self) -> int:
        return self._domain.dim

    def sampling_domain(self) -> PolyhedralSet:
        """Region samplers should draw from; may be tighter than domain."""
        return self._domain

    def _check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"point has shape {x.shape}, expected ({self.dim},)")
        if not np.isfinite(x).all():
            raise DomainError("point has non-finite coordinates")
        return x

    def value(self, x) -> float:
        raise NotImplementedError

    def gradient(self, x) -> np.ndarray:
        raise NotImplementedError

    def hessian_matrix(self, x) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, x) -> HessianSample:
        S = self.hessian_matrix(x)
        S_inv = np.linalg.inv(S)
        resid = np.abs(S @ S_inv - np.eye(self.dim)).max()
        scale = 1.0 + np.abs(S).max() * np.abs(S_inv).max()
        if resid > TOL_LINALG * scale:
            raise ArithmeticError(
                f"S S^-1 deviates from identity by {resid:.3e} (ill-conditioned Hessian)"
            )
        x = np.asarray(x, dtype=float)
        return HessianSample(tuple(x.tolist()), S, S_inv, float(np.linalg.det(S)))

    def batch_hessian(self, points) -> np.ndarray:
        """Hessians at an (m, n) block of presumed-interior points."""
        points = np.asarray(points, dtype=float)
        return np.stack([self.hessian_matrix(p) for p in points])


class CanonicalPotential(Potential):
    """s_P(x) = 1/2 sum_i l_i(x) log l_i(x) over the facets of P."""

    def __init__(self, domain: PolyhedralSet):
        interior_point(domain)  # raises if the interior is empty
        self._domain = domain
        self._normals, self._offsets = _facet_arrays(domain)

    def _facet_values(self, x):
        return self._normals @ x + self._offsets

    def value(self, x) -> float:
        x = self._check_point(x)
        vals = self._facet_values(x)
        if (vals < 0.0).any():
            raise DomainError("point lies outside the polytope")
        return 0.5 * float(xlogy(vals, vals).sum())

    def gradient(self, x) -> np.ndarray:
        x = self._check_point(x)
        vals = self._facet_values(x)
        if (vals <= 0.0).any():
            raise DomainError("gradient requires a strictly interior point")
        return 0.5 * (self._normals.T @ (np.log(vals) + 1.0))

    def hessian_matrix(self, x) -> np.ndarray:
        x = self._check_point(x)
        vals = self._facet_values(x)
        if (vals <= 0.0).any():
            raise DomainError("Hessian requires a strictly interior point")
        weights = 0.5 / vals
        return np.einsum("f,fi,fj->ij", weights, self._normals, self._normals)

    def batch_hessian(self, points) -> np.ndarray:
        points = np.ascontiguousarray(points, dtype=float)
        return kernels().log_hessians(points, self._normals, self._offsets)


class RadialCalabiPotential(Potential):
    """s = 1/2 (sum x_i log x_i + h(r)), r = sum x_i, h'' from the profile.

    The Hessian consumes h'' only; h and h' are materialized lazily (by
    partial fractions) the first time value or gradient is requested.
    """

    def __init__(self, profile: RadialProfile, base: PolyhedralSet):
        if base.dim != profile.n:
            raise ValueError(
                f"profile dimension {profile.n} does not match polytope dimension {base.dim}"
            )
        self._profile = profile
        self._domain = base
        self._normals, self._offsets = _facet_arrays(base)
        self._qc = np.array([float(c) for c in q_coefficients(profile)])
        self._h_pair = None
        self._sampling = None

    @property
    def profile(self) -> RadialProfile:
        return self._profile

    def _h_funcs(self):
        if self._h_pair is None:
            self._h_pair = h_closed_form(self._profile)
        return self._h_pair

    def _require_interior(self, x, what):
        vals = self._normals @ x + self._offsets
        if (vals <= 0.0).any() or (x <= 0.0).any():
            raise DomainError(f"{what} requires a strictly interior point")

    def value(self, x) -> float:
        x = self._check_point(x)
        vals = self._normals @ x + self._offsets
        if (vals < 0.0).any() or (x < 0.0).any():
            raise DomainError("point lies outside the polytope")
        h_val, _ = self._h_funcs()
        r = float(x.sum())
        out = 0.5 * (float(xlogy(x, x).sum()) + float(h_val(r)))
        if not np.isfinite(out):
            if (vals > 0.0).all() and (x > 0.0).all():
                raise PoleError(f"profile pole at r = {r}")
            raise DomainError("value does not extend to this facet")
        return out

    def gradient(self, x) -> np.ndarray:
        x = self._check_point(x)
        self._require_interior(x, "gradient")
        _, h_prime = self._h_funcs()
        r = float(x.sum())
        return 0.5 * (np.log(x) + 1.0 + float(h_prime(r)))

    def hessian_matrix(self, x) -> np.ndarray:
        x = self._check_point(x)
        self._require_interior(x, "Hessian")
        r = float(x.sum())
        hsec = float(h_second(self._profile, r))
        return 0.5 * (np.diag(1.0 / x) + hsec)

    def batch_hessian(self, points) -> np.ndarray:
        points = np.ascontiguousarray(points, dtype=float)
        return kernels().radial_hessians(points, self._qc, self._profile.n)

    def sampling_domain(self) -> PolyhedralSet:
        """Domain capped below the first radial pole of the profile.

        Profiles with D = 0 < C keep Q > 0 only up to a finite radius even
        when the polytope is unbounded; samplers must not cross it.
        """
        if self._sampling is None:
            r_lo = 0.0
            r_hi = None
            for f in self._domain.facets:
                first = f.normal[0]
                if first > 0 and all(c == first for c in f.normal):
                    r_lo = max(r_lo, -float(f.offset) / float(first))
                elif first < 0 and all(c == first for c in f.normal):
                    bound = -float(f.offset) / float(first)
                    r_hi = bound if r_hi is None else min(r_hi, bound)
            cut = first_pole_beyond(self._profile, r_lo)
            if cut is not None and r_hi is not None and cut >= r_hi - 1e-9 * (1.0 + r_hi):
                # a zero of Q at (or past) the outer radial facet is the
                # boundary condition itself, not an interior degeneration
                cut = None
            if cut is None:
                self._sampling = self._domain
            else:
                cap = Facet([-1] * self.dim, parse_rational(float(cut)))
                self._sampling = PolyhedralSet(
                    self.dim, list(self._domain.facets) + [cap]
                )
        return self._sampling


class SmoothCorrectionPotential(Potential):
    """s = 1/2 p(r) for a polynomial p; the smooth radial correction term."""

    def __init__(self, coefficients, domain: PolyhedralSet):
        self._raw_coeffs = list(coefficients) or [0]
        self._coeffs = np.array([float(c) for c in self._raw_coeffs], dtype=float)
        self._domain = domain
        self._d1 = np.polynomial.polynomial.polyder(self._coeffs)
        self._d2 = np.polynomial.polynomial.polyder(self._coeffs, 2)
        if self._d1.size == 0:
            self._d1 = np.zeros(1)
        if self._d2.size == 0:
            self._d2 = np.zeros(1)

    def value(self, x) -> float:
        x = self._check_point(x)
        return 0.5 * float(np.polynomial.polynomial.polyval(x.sum(), self._coeffs))

    def gradient(self, x) -> np.ndarray:
        x = self._check_point(x)
        slope = 0.5 * float(np.polynomial.polynomial.polyval(x.sum(), self._d1))
        return np.full(self.dim, slope)

    def hessian_matrix(self, x) -> np.ndarray:
        x = self._check_point(x)
        curv = 0.5 * float(np.polynomial.polynomial.polyval(x.sum(), self._d2))
        return np.full((self.dim, self.dim), curv)

    def batch_hessian(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        curv = 0.5 * np.polynomial.polynomial.polyval(points.sum(axis=1), self._d2)
        return np.broadcast_to(
            curv[:, None, None], (len(points), self.dim, self.dim)
        ).copy()


class SumPotential(Potential):
    """Pointwise sum; the domain is the intersection of the parts' domains."""

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ValueError("sum potential needs at least one part")
        dim = parts[0].dim
        if any(p.dim != dim for p in parts):
            raise ValueError("sum potential parts live in different dimensions")
        facets = [f for p in parts for f in p.domain.facets]
        self._domain = PolyhedralSet(dim, facets)
        self._parts = tuple(parts)

    @property
    def parts(self):
        return self._parts

    def value(self, x) -> float:
        return sum(p.value(x) for p in self._parts)

    def gradient(self, x) -> np.ndarray:
        return sum(p.gradient(x) for p in self._parts)

    def hessian_matrix(self, x) -> np.ndarray:
        return sum(p.hessian_matrix(x) for p in self._parts)

    def batch_hessian(self, points) -> np.ndarray:
        return sum(p.batch_hessian(points) for p in self._parts)

    def sampling_domain(self) -> PolyhedralSet:
        facets = [f for p in self._parts for f in p.sampling_domain().facets]
        return PolyhedralSet(self.dim, facets)


class TransformedPotential(Potential):
    """Pullback s(x) = s'(Tx); Hessians obey S(x) = T^t S'(Tx) T."""

    def __init__(self, inner: Potential, change: LinearChange):
        if change.dim != inner.dim:
            raise ValueError("transform dimension mismatch")
        self._inner = inner
        self._change = change
        self._domain = transform(inner.domain, change)
        self._mat = np.array(
            [[float(c) for c in row] for row in change.matrix], dtype=float
        )

    @property
    def inner(self) -> Potential:
        return self._inner

    @property
    def change(self) -> LinearChange:
        return self._change

    def value(self, x) -> float:
        x = self._check_point(x)
        return self._inner.value(self._mat @ x)

    def gradient(self, x) -> np.ndarray:
        x = self._check_point(x)
        return self._mat.T @ self._inner.gradient(self._mat @ x)

    def hessian_matrix(self, x) -> np.ndarray:
        x = self._check_point(x)
        return self._mat.T @ self._inner.hessian_matrix(self._mat @ x) @ self._mat

    def batch_hessian(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        hs = self._inner.batch_hessian(points @ self._mat.T)
        return np.einsum("ji,mjk,kl->mil", self._mat, hs, self._mat)

    def sampling_domain(self) -> PolyhedralSet:
        return transform(self._inner.sampling_domain(), self._change)


def canonical_potential(P: PolyhedralSet) -> CanonicalPotential:
    """The canonical potential s_P = 1/2 sum l_i log l_i of a polytope."""
    return CanonicalPotential(P)


def transform_potential(s: Potential, T: LinearChange) -> Potential:
    """Pullback of s under the linear change T.

    Canonical potentials pull back exactly to the canonical potential of the
    transformed polytope (the facet functions satisfy l'_i(x) = l_i(Tx));
    other variants are wrapped, composing with any existing pullback.
    """
    if isinstance(s, CanonicalPotential):
        return CanonicalPotential(transform(s.domain, T))
    if isinstance(s, TransformedPotential):
        return TransformedPotential(s.inner, s.change.compose(T))
    return TransformedPotential(s, T)


def radial_inverse_hessian(profile: RadialProfile, x) -> HessianSample:
    """Closed-form S^{-1} and Det S for a radial potential.

    S^{-1}_jk = 2 (delta_jk x_j - x_j x_k f(r)) with f = h''/(1 + r h''),
    Det S = (1 + r h'') / (2^n x_1 ... x_n).  Requires x > 0 and a
    nondegenerate metric, 1 + r h'' > 0.
    """
    x = np.asarray(x, dtype=float)
    n = profile.n
    if x.shape != (n,):
        raise DomainError(f"point has shape {x.shape}, expected ({n},)")
    if not np.isfinite(x).all() or (x <= 0.0).any():
        raise DomainError("closed-form inverse requires all x_i > 0")
    r = float(x.sum())
    hsec = float(h_second(profile, r))
    opr = float(one_plus_r_h_second(profile, r))
    if opr <= 0.0:
        raise PoleError(f"degenerate metric: 1 + r h'' = {opr:.3e} at r = {r}")
    f = float(f_value(profile, r))
    S_inv = -2.0 * f * np.outer(x, x)
    S_inv[np.diag_indices(n)] += 2.0 * x
    det_S = opr / (2.0**n * float(np.prod(x)))
    S = 0.5 * (np.diag(1.0 / x) + hsec)
    resid = np.abs(S @ S_inv - np.eye(n)).max()
    scale = 1.0 + np.abs(S).max() * np.abs(S_inv).max()
    if resid > TOL_LINALG * scale:
        raise ArithmeticError(
            f"closed-form S S^-1 deviates from identity by {resid:.3e}"
        )
    return HessianSample(tuple(x.tolist()), S, S_inv, det_S)


def complex_coordinates(s: Potential, x, y) -> np.ndarray:
    """Holomorphic coordinates z = grad s(x) + i y on the interior."""
    grad = s.gradient(x)
    y = np.asarray(y, dtype=float)
    if y.shape != grad.shape:
        raise DomainError(f"angle vector has shape {y.shape}, expected {grad.shape}")
    return grad + 1j * y


# ---------------------------------------------------------------------------
# JSON form: {"kind": "canonical" | "radial" | "dim2" | "sum" | ...}
# ---------------------------------------------------------------------------


def potential_to_json_dict(s: Potential) -> dict:
    if isinstance(s, CanonicalPotential):
        return {"kind": "canonical", "polytope": polytope_to_json_dict(s.domain)}
    if isinstance(s, RadialCalabiPotential):
        data = {"kind": "radial", "base": polytope_to_json_dict(s.domain)}
        data.update(profile_to_json_dict(s.profile))
        return data
    if isinstance(s, SumPotential):
        return {"kind": "sum", "parts": [potential_to_json_dict(p) for p in s.parts]}
    if isinstance(s, SmoothCorrectionPotential):
        return {
            "kind": "smooth_correction",
            "coefficients": [
                format_rational(c) if not isinstance(c, float) else c
                for c in s._raw_coeffs
            ],
            "domain": polytope_to_json_dict(s.domain),
        }
    if isinstance(s, TransformedPotential):
        return {
            "kind": "transformed",
            "inner": potential_to_json_dict(s.inner),
            "matrix": [[format_rational(c) for c in row] for row in s.change.matrix],
        }
    from .dim2 import Dim2Potential, dim2_potential_to_json_dict

    if isinstance(s, Dim2Potential):
        return dim2_potential_to_json_dict(s)
    raise TypeError(f"cannot serialize potential of type {type(s).__name__}")


def potential_from_json_dict(data: dict) -> Potential:
    kind = data.get("kind")
    if kind == "canonical":
        return CanonicalPotential(polytope_from_json_dict(data["polytope"]))
    if kind == "radial":
        profile = profile_from_json_dict(data)
        return RadialCalabiPotential(profile, polytope_from_json_dict(data["base"]))
    if kind == "sum":
        return SumPotential([potential_from_json_dict(p) for p in data["parts"]])
    if kind == "smooth_correction":
        coeffs = [
            c if isinstance(c, float) else parse_rational(c)
            for c in data["coefficients"]
        ]
        return SmoothCorrectionPotential(coeffs, polytope_from_json_dict(data["domain"]))
    if kind == "transformed":
        change = LinearChange(
            [[parse_rational(c) for c in row] for row in data["matrix"]]
        )
        return TransformedPotential(potential_from_json_dict(data["inner"]), change)
    if kind == "dim2":
        from .dim2 import dim2_potential_from_json_dict

        return dim2_potential_from_json_dict(data)
    raise ValueError(f"unknown potential kind {kind!r}")
