"""Numerical certification of the symplectic-potential conditions.

A potential defines a genuine toric complex structure when its Hessian S
is positive definite on the interior and the determinant obeys the
boundary law Det(S) = (delta * prod_r l_r)^{-1} with delta smooth and
strictly positive up to the boundary.  Neither condition is decidable
from samples, so this module certifies a proxy: Cholesky success on an
interior mesh, plus finite positive extrapolated limits of

    delta(x) = 1 / (Det S(x) * prod_r l_r(x))

along inward-normal rays toward every facet (and along corner diagonals),
with bounded variation between the last two approach distances.  Reports
say pass/fail with reasons; they never claim more than consistency.

For radial potentials delta is computed twice, from the numeric Hessian
determinant and from the closed-form determinant identity, and the two
routes must agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .backend import kernels
from .calabi import PolytopeSpec, RadialProfile, q_value
from .curvature import _diameter_proxy, sample_interior
from .polytope import DomainError, PolyhedralSet, chebyshev_center
from .potential import Potential, RadialCalabiPotential, _facet_arrays, radial_inverse_hessian

APPROACH_DISTANCES = (1e-2, 1e-3, 1e-4)
VARIATION_BOUND = 0.1
ROUTE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ValidationReport:
    pd_count: int
    pd_failures: tuple  # points where Cholesky failed
    delta_values: tuple  # (ray label, distance, point, delta)
    delta_min: float
    delta_max: float
    delta_limits: tuple  # (ray label, extrapolated facet limit)
    route_deviation: float | None
    q_positivity: float | None
    verdict: str
    reasons: tuple

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json_dict(self) -> dict:
        return {
            "pd_count": self.pd_count,
            "pd_failures": [list(p) for p in self.pd_failures],
            "delta_values": [
                {"ray": ray, "distance": d, "x": list(p), "delta": v}
                for ray, d, p, v in self.delta_values
            ],
            "delta_min": self.delta_min,
            "delta_max": self.delta_max,
            "delta_limits": [
                {"ray": ray, "limit": v} for ray, v in self.delta_limits
            ],
            "route_deviation": self.route_deviation,
            "q_positivity": self.q_positivity,
            "verdict": self.verdict,
            "reasons": list(self.reasons),
        }


def _facet_anchor(P: PolyhedralSet, i: int, box: float):
    """Chebyshev center of facet i: deepest point of the facet itself.

    Starting the inward-normal ray here keeps the probe inside the domain
    even when the polytope's center does not project onto the facet.
    """
    normals, offsets = _facet_arrays(P)
    n = P.dim
    rows = [k for k in range(len(offsets)) if k != i]
    if rows:
        norms = np.linalg.norm(normals[rows], axis=1)
        A_ub = np.hstack([-normals[rows], norms[:, None]])
        b_ub = offsets[rows]
    else:
        A_ub, b_ub = None, None
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    res = linprog(
        cost,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=np.hstack([normals[i], [0.0]])[None, :],
        b_eq=[-offsets[i]],
        bounds=[(-box, box)] * n + [(0.0, box)],
        method="highs",
    )
    if not res.success:
        return None
    return res.x[:n]


def _corner_anchor(P: PolyhedralSet, i: int, j: int, box: float):
    """Deepest point of the facet-pair corner, or None when incompatible.

    Minimizes l_i + l_j over P (within the probe box); a shared corner
    exists exactly when the minimum is ~0 for both terms.
    """
    normals, offsets = _facet_arrays(P)
    n = P.dim
    cost = normals[i] + normals[j]
    res = linprog(
        cost,
        A_ub=-normals,
        b_ub=offsets,
        bounds=[(-box, box)] * n,
        method="highs",
    )
    if not res.success:
        return None
    point = res.x
    values = normals @ point + offsets
    scale = 1e-9 * (1.0 + np.abs(offsets).max())
    if values[i] > scale or values[j] > scale:
        return None
    return point


def _delta_at(s: Potential, normals, offsets, x: np.ndarray):
    """(delta_numeric, delta_closed or None) at one interior point."""
    det = float(np.linalg.det(s.hessian_matrix(x)))
    prod_l = float(np.prod(normals @ x + offsets))
    delta = 1.0 / (det * prod_l)
    closed = None
    if isinstance(s, RadialCalabiPotential):
        det_closed = radial_inverse_hessian(s.profile, x).det_S
        closed = 1.0 / (det_closed * prod_l)
    return delta, closed


def validate_potential(s: Potential, P: PolyhedralSet, mesh: int = 8) -> ValidationReport:
    """Positive definiteness on an interior mesh plus the boundary delta law.

    The mesh density is per dimension (mesh**dim points, capped at 4096).
    Evaluation failures turn into reasons on a fail verdict rather than
    exceptions.
    """
    if mesh < 4:
        raise ValueError("mesh must be at least 4")
    reasons = []
    normals, offsets = _facet_arrays(P)
    norms = np.linalg.norm(normals, axis=1) if len(P.facets) else np.zeros(0)
    scale = _diameter_proxy(P)

    # --- interior positive-definiteness mesh ---
    n_pd = min(mesh**P.dim, 4096)
    pd_failures = []
    pd_count = 0
    try:
        points = sample_interior(P, n_pd, seed=1, margin_frac=0.02)
        hess = s.batch_hessian(points)
        flags = kernels().pd_flags(np.ascontiguousarray(hess))
        pd_count = len(points)
        pd_failures = [tuple(p.tolist()) for p in points[~flags]]
        if pd_failures:
            reasons.append(
                f"Hessian not positive definite at {len(pd_failures)} of {pd_count} mesh points"
            )
    except (DomainError, ValueError, ArithmeticError) as exc:
        reasons.append(f"positive-definiteness mesh failed: {exc}")

    # --- delta along facet normals and corner diagonals ---
    delta_values = []
    delta_limits = []
    route_dev = None
    try:
        anchor = np.array(chebyshev_center(P)[0], dtype=float)
    except DomainError as exc:
        reasons.append(f"no interior anchor: {exc}")
        anchor = None

    def probe_ray(label, base, direction):
        nonlocal route_dev
        history = []
        for d in APPROACH_DISTANCES:
            x = base + (d * scale) * direction
            vals = normals @ x + offsets
            if (vals <= 0.0).any():
                reasons.append(f"{label}: probe at distance {d:g} left the domain")
                return
            try:
                delta, closed = _delta_at(s, normals, offsets, x)
            except (DomainError, ValueError, ArithmeticError) as exc:
                reasons.append(f"{label}: delta evaluation failed at {d:g}: {exc}")
                return
            if closed is not None:
                dev = abs(delta - closed) / (1.0 + abs(closed))
                route_dev = dev if route_dev is None else max(route_dev, dev)
            delta_values.append((label, d, tuple(x.tolist()), delta))
            history.append(delta)
        # geometric spacing: linear extrapolation to distance 0
        limit = (10.0 * history[2] - history[1]) / 9.0
        delta_limits.append((label, limit))
        if not (np.isfinite(limit) and limit > 0.0):
            reasons.append(f"{label}: facet limit of delta is not finite positive ({limit:g})")
        if abs(history[1] - history[2]) >= VARIATION_BOUND * abs(history[2]):
            reasons.append(
                f"{label}: delta varies too fast near the boundary "
                f"({history[1]:.6g} vs {history[2]:.6g})"
            )

    if anchor is not None and len(P.facets):
        box = 10.0 * (1.0 + float(np.abs(offsets).max()) + float(np.abs(anchor).max()))
        for i in range(len(P.facets)):
            nu = normals[i] / norms[i]
            base = _facet_anchor(P, i, box)
            if base is None:
                reasons.append(f"facet {i}: no anchor point found on the facet")
                continue
            probe_ray(f"facet {i}", base, nu)
        for i in range(len(P.facets)):
            for j in range(i + 1, len(P.facets)):
                corner = _corner_anchor(P, i, j, box)
                if corner is None:
                    continue
                gap = anchor - corner
                length = float(np.linalg.norm(gap))
                if length <= 0.0:
                    continue
                probe_ray(f"corner {i}-{j}", corner, gap / length)

    if route_dev is not None and route_dev > ROUTE_TOL:
        reasons.append(
            f"numeric and closed-form delta routes disagree ({route_dev:.3e})"
        )

    finite = [v for *_, v in delta_values if np.isfinite(v)]
    delta_min = min(finite) if finite else float("nan")
    delta_max = max(finite) if finite else float("nan")
    if not finite:
        reasons.append("no delta samples were collected")
    elif delta_min <= 0.0:
        reasons.append(f"delta is not strictly positive (min {delta_min:.6g})")

    q_min = None
    if isinstance(s, RadialCalabiPotential):
        q_min = _q_minimum_on_box(s.profile, P)
        if q_min is not None and q_min <= 0.0:
            reasons.append(f"Q takes nonpositive values on the domain (min {q_min:.6g})")

    verdict = "pass" if not reasons else "fail"
    return ValidationReport(
        pd_count,
        tuple(pd_failures),
        tuple(delta_values),
        delta_min,
        delta_max,
        tuple(delta_limits),
        route_dev,
        q_min,
        verdict,
        tuple(reasons),
    )


def _radial_bounds(P: PolyhedralSet):
    """(a, b or None) read off facets with normals proportional to (1,..,1)."""
    lo, hi = 0.0, None
    for f in P.facets:
        first = f.normal[0]
        if first != 0 and all(c == first for c in f.normal):
            bound = -float(f.offset) / float(first)
            if first > 0:
                lo = max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
    return lo, hi


def _q_minimum_on_box(profile: RadialProfile, P: PolyhedralSet, mesh: int = 256):
    lo, hi = _radial_bounds(P)
    if hi is None:
        hi = 10.0 * lo if lo > 0 else 10.0
    eps = 1e-6 * (hi - lo) if hi > lo else 0.0
    grid = np.linspace(lo + eps, hi - eps, mesh)
    grid = grid[grid > 0]
    if not len(grid):
        return None
    return float(min(float(q_value(profile, float(r))) for r in grid))


def q_positivity(profile: RadialProfile, spec: PolytopeSpec, mesh: int = 256) -> float:
    """Min of Q on an inset radial mesh: [a+eps, b-eps], or [a+eps, 10a].

    A positive value certifies (at mesh resolution) that the metric is
    nondegenerate on the polytope; eps = 1e-6 * (b - a) or 1e-6 * a keeps
    the mesh off the certified boundary zeros.
    """
    if mesh < 2:
        raise ValueError("mesh must be at least 2")
    a = float(spec.a)
    if spec.bounded:
        b = float(spec.b)
        eps = 1e-6 * (b - a)
    else:
        b = 10.0 * a
        eps = 1e-6 * a
    grid = np.linspace(a + eps, b - eps, mesh)
    return float(min(float(q_value(profile, float(r))) for r in grid))
