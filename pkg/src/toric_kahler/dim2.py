"""Constant-curvature surface catalogue: 1D potentials with quadratic 1/s''.

Families are cut out by s''(x) = -1/(k x^2 - 2 b x - c) with k the Gauss
curvature.  After normalizing away b (translation, and a sign flip when
k = 0 > b), the sign pattern of (k, c) selects the case:

    k = 0, b = 0, c > 0   cylinder          P = R
    k = 0, b > 0, c = 0   cone              P = [0, oo)
    k > 0, c > 0          football          P = [-sqrt(c/k), sqrt(c/k)]
    k < 0, c > 0          hyperboloid       P = R
    k < 0, c < 0          hyperbolic_disc   P = [sqrt(c/k), oo)
    k < 0, c = 0          cusp              P = (0, oo)

Anything else is invalid (s'' fails to be positive on every candidate
interval).  The normalization (shift, flip) is recorded so callers keep
their original parameters; domains and potentials live in the normalized
coordinate.  Cone points are reported through their angle coefficient:
angle = pi * b for the cone apex, pi * sqrt(ck) at football poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy.special import xlogy

from .calabi import _coerce_number, _is_zero
from .polytope import DomainError, PolyhedralSet, interval
from .potential import Potential
from .rational import format_rational, parse_rational

CASES = (
    "cylinder",
    "cone",
    "football",
    "hyperboloid",
    "hyperbolic_disc",
    "cusp",
    "invalid",
)


def _exact_sqrt(value):
    """Exact rational square root, or a float when irrational."""
    if isinstance(value, Rational) and value >= 0:
        value = Fraction(value)
        pn, pd = math.isqrt(value.numerator), math.isqrt(value.denominator)
        if pn * pn == value.numerator and pd * pd == value.denominator:
            return Fraction(pn, pd)
    return math.sqrt(float(value))


@dataclass(frozen=True, eq=False)
class Dim2Family:
    """A classified (k, b, c) triple with its normalized catalogue data."""

    k: object
    b: object
    c: object
    case_tag: str
    domain: PolyhedralSet | None
    shift: object  # original x = flip * x_normalized + shift
    flip: int
    b_norm: object
    c_norm: object
    cone_angle_over_pi: object | None
    pole_angle_over_pi: object | None
    smooth: bool | None
    notes: tuple


def classify_dim2(k, b, c) -> Dim2Family:
    """Case analysis of s'' = -1/(kx^2 - 2bx - c) after normalizing b away.

    Returns a Dim2Family whose domain is the maximal interval (in the
    normalized coordinate) on which s'' > 0; case_tag is "invalid" when no
    such interval exists.
    """
    # ints join the Fraction lane so the divisions below stay exact
    k, b, c = (
        Fraction(v) if isinstance(v, int) else v
        for v in (_coerce_number(k), _coerce_number(b), _coerce_number(c))
    )
    notes = []

    def family(case, dom, shift, flip, b_n, c_n, cone_angle, pole_angle, smooth):
        return Dim2Family(
            k, b, c, case, dom, shift, flip, b_n, c_n,
            cone_angle, pole_angle, smooth, tuple(notes),
        )

    if _is_zero(k):
        if _is_zero(b):
            if not _is_zero(c) and c > 0:
                return family("cylinder", interval(), 0, 1, 0, c, None, None, True)
            return family("invalid", None, 0, 1, b, c, None, None, None)
        # kill c by translation, flip to make the slope positive
        shift = -c / (2 * b)
        flip = 1 if b > 0 else -1
        b_n = b if b > 0 else -b
        if not _is_zero(b_n - 1) and b_n < 1:
            inv = 1 / b_n
            p = round(float(inv))
            if abs(float(inv) - p) < 1e-12 and p >= 2:
                notes.append(f"b = 1/{p}: quotient cone R^2/Z_{p}")
        smooth = bool(_is_zero(b_n - 1))
        return family("cone", interval(0), shift, flip, b_n, 0, b_n, None, smooth)

    # complete the square: kx^2 - 2bx - c = k(x - b/k)^2 - (c + b^2/k)
    shift = b / k
    c_n = c + b * b / k
    if k > 0:
        if not _is_zero(c_n) and c_n > 0:
            u = _exact_sqrt(c_n / k)
            angle = _exact_sqrt(c_n * k)
            smooth = bool(_is_zero(angle - 1))
            return family(
                "football", interval(-u, u), shift, 1, 0, c_n, None, angle, smooth
            )
        return family("invalid", None, shift, 1, 0, c_n, None, None, None)
    if _is_zero(c_n):
        return family("cusp", interval(0), shift, 1, 0, 0, None, None, True)
    if c_n > 0:
        return family("hyperboloid", interval(), shift, 1, 0, c_n, None, None, True)
    u = _exact_sqrt(c_n / k)  # both negative: positive ratio
    angle = _exact_sqrt(c_n * k)
    smooth = bool(_is_zero(angle - 1))
    notes.append("left component (x <= -sqrt(c/k)) is the mirror image")
    return family(
        "hyperbolic_disc", interval(u), shift, 1, 0, c_n, None, angle, smooth
    )


class Dim2Potential(Potential):
    """Closed-form potential of a catalogue family on its normalized domain.

    The Hessian always evaluates through the quadratic 1/s'' directly;
    value and gradient use the per-case integrated forms, which the tests
    differentiate back against the quadratic.
    """

    def __init__(self, family: Dim2Family):
        if family.case_tag == "invalid":
            raise ValueError("invalid dim2 family has no potential")
        self.family = family
        self._domain = family.domain
        self._k = float(family.k)
        self._c = float(family.c_norm)
        self._b = float(family.b_norm)
        # cached case constants
        if family.case_tag in ("football", "hyperbolic_disc"):
            self._u = math.sqrt(self._c / self._k)
            self._w = 1.0 / (2.0 * math.sqrt(self._c * self._k))
        elif family.case_tag == "hyperboloid":
            self._alpha = math.sqrt(-self._k / self._c)
            self._beta = math.sqrt(-1.0 / (self._c * self._k))

    def _inside(self, x, strict):
        vals = [float(f.value((x,))) for f in self._domain.facets]
        if strict:
            return all(v > 0.0 for v in vals)
        return all(v >= 0.0 for v in vals)

    def inverse_s_double_prime(self, x: float) -> float:
        """1/s'' = -(k x^2 - 2 b x - c) in the normalized coordinate."""
        return self._c + 2.0 * self._b * x - self._k * x * x

    def s_double_prime(self, x: float) -> float:
        return 1.0 / self.inverse_s_double_prime(x)

    def s_double_prime_from_form(self, x: float) -> float:
        """s'' by differentiating the case's closed form (test hook)."""
        tag = self.family.case_tag
        if tag == "cylinder":
            return 1.0 / self._c
        if tag == "cone":
            return 1.0 / (2.0 * self._b * x)
        if tag == "football":
            return self._w * (1.0 / (x + self._u) + 1.0 / (self._u - x))
        if tag == "hyperboloid":
            a = self._alpha
            return self._beta * a / (1.0 + a * a * x * x)
        if tag == "hyperbolic_disc":
            return self._w * (1.0 / (x - self._u) - 1.0 / (x + self._u))
        return -1.0 / (self._k * x * x)  # cusp

    def value(self, x) -> float:
        x = self._check_point(x)
        if not self._inside(x[0], strict=False):
            raise DomainError("point lies outside the domain interval")
        t = float(x[0])
        tag = self.family.case_tag
        if tag == "cylinder":
            out = t * t / (2.0 * self._c)
        elif tag == "cone":
            out = float(xlogy(t, t)) / (2.0 * self._b)
        elif tag == "football":
            out = self._w * float(
                xlogy(t + self._u, t + self._u) + xlogy(self._u - t, self._u - t)
            )
        elif tag == "hyperboloid":
            a = self._alpha
            out = self._beta * (
                t * math.atan(a * t) - math.log(1.0 + a * a * t * t) / (2.0 * a)
            )
        elif tag == "hyperbolic_disc":
            out = self._w * float(
                xlogy(t - self._u, t - self._u) - xlogy(t + self._u, t + self._u)
            )
        else:  # cusp
            out = math.log(t) / self._k if t > 0 else math.inf
        if not np.isfinite(out):
            raise DomainError("value does not extend to this boundary point")
        return out

    def gradient(self, x) -> np.ndarray:
        x = self._check_point(x)
        if not self._inside(x[0], strict=True):
            raise DomainError("gradient requires a strictly interior point")
        t = float(x[0])
        tag = self.family.case_tag
        if tag == "cylinder":
            g = t / self._c
        elif tag == "cone":
            g = (math.log(t) + 1.0) / (2.0 * self._b)
        elif tag == "football":
            g = self._w * (math.log(t + self._u) - math.log(self._u - t))
        elif tag == "hyperboloid":
            g = self._beta * math.atan(self._alpha * t)
        elif tag == "hyperbolic_disc":
            g = self._w * (math.log(t - self._u) - math.log(t + self._u))
        else:  # cusp
            g = 1.0 / (self._k * t)
        return np.array([g])

    def hessian_matrix(self, x) -> np.ndarray:
        x = self._check_point(x)
        if not self._inside(x[0], strict=True):
            raise DomainError("Hessian requires a strictly interior point")
        return np.array([[self.s_double_prime(float(x[0]))]])

    def batch_hessian(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        t = points[:, 0]
        ssp = 1.0 / (self._c + 2.0 * self._b * t - self._k * t * t)
        return ssp[:, None, None]


def potential_dim2(family: Dim2Family) -> Dim2Potential:
    """The closed-form potential of a non-invalid family."""
    return Dim2Potential(family)


def gauss_curvature_check(family: Dim2Family, x) -> float:
    """Numeric scalar curvature at x via the general FD route.

    The analytic value is -(1/s'')'' = 2k identically (the quadratic has
    second derivative -2k); the return value is the numeric estimate that
    tests compare against 2k, i.e. twice the Gauss curvature.
    """
    from .curvature import scalar_curvature_general

    return scalar_curvature_general(potential_dim2(family), [float(x)])


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _num(value):
    if isinstance(value, float):
        return value
    if value is None:
        return None
    return format_rational(value)


def family_to_json_dict(family: Dim2Family) -> dict:
    from .polytope import to_json_dict as polytope_to_json_dict

    return {
        "k": _num(family.k),
        "b": _num(family.b),
        "c": _num(family.c),
        "case": family.case_tag,
        "domain": (
            None if family.domain is None else polytope_to_json_dict(family.domain)
        ),
        "normalized": {
            "b": _num(family.b_norm),
            "c": _num(family.c_norm),
            "shift": _num(family.shift),
            "flip": family.flip,
        },
        "cone_angle_over_pi": _num(family.cone_angle_over_pi),
        "pole_angle_over_pi": _num(family.pole_angle_over_pi),
        "smooth": family.smooth,
        "notes": list(family.notes),
    }


def dim2_potential_to_json_dict(s: Dim2Potential) -> dict:
    return {
        "kind": "dim2",
        "k": _num(s.family.k),
        "b": _num(s.family.b),
        "c": _num(s.family.c),
    }


def dim2_potential_from_json_dict(data: dict) -> Dim2Potential:
    params = [
        v if isinstance(v, float) else parse_rational(v)
        for v in (data["k"], data["b"], data["c"])
    ]
    return potential_dim2(classify_dim2(*params))
