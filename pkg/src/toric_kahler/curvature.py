"""General-route scalar curvature and extremality testing.

The general route differentiates the inverse Hessian numerically:

    Sc(x) = - sum_{j,k} d^2 s^{jk} / dx_j dx_k,

with s^{jk} = (Hess s)^{-1} entries evaluated by closed-form Hessian plus
numeric inversion at the stencil points.  This is deliberately independent
of the closed radial curvature formula so the two can cross-check each
other.

Stencil: second-order central differences, per-point step 1e-3 * margin,
mixed partials by the 4-point cross.  Sample placement: scrambled Sobol
points in the coordinate box, filtered to margin >= 0.05 * (2 * inradius).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import qmc

from .calabi import (
    Classification,
    PolytopeSpec,
    RadialProfile,
    build_potential,
    classification_to_json_dict,
    classify,
    scalar_curvature_radial,
)
from .polytope import DomainError, PolyhedralSet, boundary_margin, chebyshev_center, coordinate_extents
from .potential import Potential, _facet_arrays

STEP_FRACTION = 1e-3
MARGIN_FRACTION = 0.05
EXTREMAL_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class CurvatureReport:
    """Sampled curvature data with an affine fit of Sc over the samples."""

    samples: tuple  # of (point tuple, sc_general, sc_closed or None)
    max_rel_err: float | None
    affine_fit: tuple  # (gradient tuple, intercept, residual)
    flags: Classification | None

    @property
    def extremal(self) -> bool:
        """Affine-fit residual below the scale-aware extremality tolerance."""
        values = [s[1] for s in self.samples]
        scale = 1.0 + max(abs(v) for v in values)
        return self.affine_fit[2] < EXTREMAL_TOL * scale

    def to_json_dict(self) -> dict:
        gradient, intercept, residual = self.affine_fit
        rows = []
        for point, general, closed in self.samples:
            row = {"x": list(point), "sc_general": general, "sc_closed": closed}
            if closed is not None:
                row["rel_err"] = abs(general - closed) / (1.0 + abs(closed))
            rows.append(row)
        return {
            "samples": rows,
            "max_rel_err": self.max_rel_err,
            "affine_fit": {
                "gradient": list(gradient),
                "intercept": intercept,
                "residual": residual,
            },
            "extremal": self.extremal,
            "classification": (
                classification_to_json_dict(self.flags) if self.flags else None
            ),
        }

    def to_csv(self) -> str:
        n = len(self.samples[0][0]) if self.samples else 0
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(
            [f"x_{i + 1}" for i in range(n)] + ["r", "Sc_general", "Sc_closed", "rel_err"]
        )
        for point, general, closed in self.samples:
            rel = "" if closed is None else abs(general - closed) / (1.0 + abs(closed))
            writer.writerow(
                list(point)
                + [sum(point), general, "" if closed is None else closed, rel]
            )
        return out.getvalue()


# ---------------------------------------------------------------------------
# interior sampling
# ---------------------------------------------------------------------------


def _diameter_proxy(P: PolyhedralSet) -> float:
    """Twice the inradius, falling back to the probe box for facet-free sets."""
    if len(P.facets) == 0:
        lo, hi = zip(*coordinate_extents(P))
        return float(min(h - l for l, h in zip(lo, hi)))
    _, t = chebyshev_center(P)
    if not np.isfinite(t):
        lo, hi = zip(*coordinate_extents(P))
        return float(min(h - l for l, h in zip(lo, hi)))
    return 2.0 * float(t)


def _margins(P: PolyhedralSet, points: np.ndarray) -> np.ndarray:
    normals, offsets = _facet_arrays(P)
    if normals.shape[0] == 0:
        return np.full(len(points), np.inf)
    norms = np.linalg.norm(normals, axis=1)
    return ((points @ normals.T + offsets) / norms).min(axis=1)


def sample_interior(P: PolyhedralSet, n_samples: int, seed=0, margin_frac=MARGIN_FRACTION):
    """Quasi-random interior points with margin >= margin_frac * diameter proxy.

    Scrambled Sobol points in the coordinate box, filtered by Euclidean
    boundary margin.  Deterministic for a fixed seed (the Sobol prefix is
    extended until enough points survive the filter).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    n = P.dim
    extents = coordinate_extents(P)
    lo = np.array([e[0] for e in extents])
    hi = np.array([e[1] for e in extents])
    floor = margin_frac * _diameter_proxy(P)
    exponent = max(4, int(np.ceil(np.log2(max(4 * n_samples, 2)))))
    while exponent <= 22:
        engine = qmc.Sobol(n, scramble=True, seed=seed)
        raw = engine.random_base2(exponent)
        points = lo + raw * (hi - lo)
        keep = points[_margins(P, points) >= floor]
        if len(keep) >= n_samples:
            return keep[:n_samples]
        exponent += 1
    raise DomainError(
        f"could not place {n_samples} interior samples with margin {floor:.3g}"
    )


# ---------------------------------------------------------------------------
# general-route curvature
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _stencil(n: int):
    """Displacement table (K, n) in units of h, with index maps.

    Index 0 is the center; axis_plus/axis_minus give the +-h e_j points;
    cross[(j,k)] gives the 4-point (++, +-, -+, --) indices.
    """
    disp = [np.zeros(n)]
    axis_plus = []
    axis_minus = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        axis_plus.append(len(disp))
        disp.append(e)
        axis_minus.append(len(disp))
        disp.append(-e)
    cross = {}
    for j in range(n):
        for k in range(j + 1, n):
            ids = []
            for sj, sk in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                d = np.zeros(n)
                d[j] = sj
                d[k] = sk
                ids.append(len(disp))
                disp.append(d)
            cross[(j, k)] = tuple(ids)
    return np.array(disp), tuple(axis_plus), tuple(axis_minus), cross


def _stencil_points_ok(s: Potential, stencils: np.ndarray) -> None:
    normals, offsets = _facet_arrays(s.domain)
    if normals.shape[0] == 0:
        return
    flat = stencils.reshape(-1, stencils.shape[-1])
    values = flat @ normals.T + offsets
    if (values <= 0.0).any():
        raise DomainError("finite-difference stencil leaves the domain")


def _general_batch(s: Potential, points: np.ndarray, step=None) -> np.ndarray:
    """Sc at each point by second differences of the numeric inverse Hessian."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    m, n = points.shape
    margins = _margins(s.domain, points)
    cap = _diameter_proxy(s.domain)
    if not np.isfinite(cap):
        cap = 1.0 + np.abs(points).max()
    eff = np.minimum(margins, cap)
    if step is None:
        h = STEP_FRACTION * eff
    else:
        h = np.full(m, float(step))
        if (eff < 10.0 * h).any():
            raise DomainError("margin below 10x the finite-difference step")
    if (eff <= 0.0).any():
        raise DomainError("curvature stencil needs strictly interior points")

    disp, axis_plus, axis_minus, cross = _stencil(n)
    stencils = points[:, None, :] + h[:, None, None] * disp[None, :, :]
    _stencil_points_ok(s, stencils)
    K = disp.shape[0]
    hess = s.batch_hessian(stencils.reshape(m * K, n))
    if not np.isfinite(hess).all():
        raise ArithmeticError("Hessian not finite at a stencil point")
    try:
        inv = np.linalg.inv(hess).reshape(m, K, n, n)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("singular Hessian at a stencil point") from exc

    total = np.zeros(m)
    h2 = h * h
    for j in range(n):
        total += (
            inv[:, axis_plus[j], j, j]
            - 2.0 * inv[:, 0, j, j]
            + inv[:, axis_minus[j], j, j]
        ) / h2
    for (j, k), (pp, pm, mp, mm) in cross.items():
        total += (
            2.0
            * (inv[:, pp, j, k] - inv[:, pm, j, k] - inv[:, mp, j, k] + inv[:, mm, j, k])
            / (4.0 * h2)
        )
    return -total


def scalar_curvature_general(s: Potential, x, step=None) -> float:
    """Scalar curvature at one interior point by the second-difference route."""
    return float(_general_batch(s, np.asarray(x, dtype=float)[None, :], step=step)[0])


def _affine_fit(points: np.ndarray, values: np.ndarray):
    design = np.hstack([points, np.ones((len(points), 1))])
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    residual = float(np.abs(values - design @ coef).max())
    return tuple(coef[:-1].tolist()), float(coef[-1]), residual


def verify_extremal(
    s: Potential, P: PolyhedralSet, n_samples: int, seed=0, step=None
) -> CurvatureReport:
    """Sample Sc and test whether it is an affine function of x.

    Extremal metrics have affine scalar curvature; the report's extremal
    flag compares the max fit deviation against 1e-4 * (1 + max |Sc|).
    """
    if n_samples < P.dim + 2:
        raise ValueError(f"need at least {P.dim + 2} samples for the affine fit")
    region = P
    tighter = s.sampling_domain()
    if tighter is not s.domain and tighter != P:
        region = PolyhedralSet(P.dim, list(P.facets) + list(tighter.facets))
    points = sample_interior(region, n_samples, seed=seed)
    values = _general_batch(s, points, step=step)
    fit = _affine_fit(points, values)
    samples = tuple(
        (tuple(p.tolist()), float(v), None) for p, v in zip(points, values)
    )
    return CurvatureReport(samples, None, fit, None)


def cross_validate(
    profile: RadialProfile, spec: PolytopeSpec, n_samples: int, seed=0, step=None
) -> CurvatureReport:
    """Compare the general FD route against the closed radial curvature."""
    s = build_potential(profile, spec)
    points = sample_interior(s.sampling_domain(), n_samples, seed=seed)
    general = _general_batch(s, points, step=step)
    closed = np.array(
        [float(scalar_curvature_radial(profile, float(p.sum()))) for p in points]
    )
    finite = np.isfinite(general) & np.isfinite(closed)
    rel = np.abs(general[finite] - closed[finite]) / (1.0 + np.abs(closed[finite]))
    fit = _affine_fit(points, general)
    samples = tuple(
        (tuple(p.tolist()), float(g), float(c))
        for p, g, c in zip(points, general, closed)
    )
    return CurvatureReport(
        samples, float(rel.max()) if len(rel) else None, fit, classify(profile)
    )
