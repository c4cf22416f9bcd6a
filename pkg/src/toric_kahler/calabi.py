"""Calabi's four-parameter radial family of extremal toric Kahler metrics.

A profile (n, A, B, C, D) determines the radial part of a symplectic
potential through

    h''(r) = -1/r + r^(n-1) / Q(r),
    Q(r)   = r^n - A - B r - C r^(n+1) - D r^(n+2),

on polytopes P^n_m(a, b) = {x_i > 0, a < x_1 + ... + x_n < b} whose two radial
facets carry the integer label m.  The four parameters are pinned by matching
the simple-pole residues of r^(n-1)/Q at the radial boundary values:

    Q(a) = 0,   Q'(a) =  m a^(n-1),
    Q(b) = 0,   Q'(b) = -m b^(n-1)      (bounded case),

which makes h'' + 1/r behave like 1/(m(r-a)) near r=a, exactly the boundary
singularity the canonical potential of a labeled facet requires.  Unbounded
sets replace the two b-equations by two explicit constraints among
{B=0, C=0, D=0, C=c0}.

Everything downstream (metric, curvature, determinant law) consumes h'' and
its exact rational-function calculus; h itself is only needed to evaluate the
potential and its gradient and is materialized separately by partial
fractions (see h_closed_form).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .polytope import Facet, PolyhedralSet, orthant
from .rational import all_rational, format_rational, parse_rational, solve_exact, solve_float


class PoleError(ValueError):
    """Evaluation hit a zero of Q (a pole of the profile)."""


class ConstraintError(ValueError):
    """Constraint set and boundary conditions do not make a 4x4 system."""


_FLOAT_ZERO_TOL = 1e-12


def _coerce_number(value):
    """Exact rationals stay exact; floats stay floats."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers")
    if isinstance(value, Rational):
        return value if isinstance(value, (int, Fraction)) else Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as a number")


def _is_zero(value) -> bool:
    if isinstance(value, Rational):
        return value == 0
    return abs(value) < _FLOAT_ZERO_TOL


@dataclass(frozen=True)
class RadialProfile:
    """The family datum (n, A, B, C, D)."""

    n: int
    A: object
    B: object
    C: object
    D: object

    def __init__(self, n, A, B, C, D):
        n = int(n)
        if n < 1:
            raise ValueError("dimension n must be >= 1")
        object.__setattr__(self, "n", n)
        for name, value in (("A", A), ("B", B), ("C", C), ("D", D)):
            object.__setattr__(self, name, _coerce_number(value))

    def is_rational(self) -> bool:
        return all_rational((self.A, self.B, self.C, self.D))


@dataclass(frozen=True)
class PolytopeSpec:
    """P^n_m(a, b): twisting label m and radial boundary values 0 < a < b.

    b = None means the unbounded set P^n_m(a).
    """

    n: int
    m: int
    a: object
    b: object

    def __init__(self, n, m, a, b=None):
        n = int(n)
        m = int(m)
        if n < 1:
            raise ValueError("dimension n must be >= 1")
        if m < 1:
            raise ValueError("twisting m must be a positive integer")
        a = _coerce_number(a)
        if not a > 0:
            raise ValueError("a must be positive")
        if b is not None:
            b = _coerce_number(b)
            if not b > a:
                raise ValueError("need a < b")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def bounded(self) -> bool:
        return self.b is not None


def q_coefficients(profile: RadialProfile):
    """Coefficients of Q(r), highest degree first, length n+3.

    Accumulated by degree, so the n=1 collision between the r^n and B r
    terms comes out right.
    """
    n = profile.n
    coeffs = [0] * (n + 3)  # index d holds the degree-(n+2-d) coefficient

    def add(degree, value):
        coeffs[n + 2 - degree] += value

    add(n, 1)
    add(0, -profile.A)
    add(1, -profile.B)
    add(n + 1, -profile.C)
    add(n + 2, -profile.D)
    return coeffs


def _poly_eval(coeffs, r):
    value = 0
    for c in coeffs:
        value = value * r + c
    return value


def _poly_derivative(coeffs):
    top = len(coeffs) - 1
    return [c * (top - i) for i, c in enumerate(coeffs[:-1])]


def q_value(profile: RadialProfile, r):
    return _poly_eval(q_coefficients(profile), r)


def q_derivative(profile: RadialProfile, r):
    return _poly_eval(_poly_derivative(q_coefficients(profile)), r)


def h_second(profile: RadialProfile, r):
    """h''(r) = -1/r + r^(n-1)/Q(r); exact for rational inputs."""
    if not r > 0:
        raise PoleError("h'' is defined for r > 0 only")
    q = q_value(profile, r)
    if _is_zero(q):
        raise PoleError(f"Q({r}) = 0: pole of the profile")
    return -1 / r + r ** (profile.n - 1) / q


def one_plus_r_h_second(profile: RadialProfile, r):
    """1 + r h''(r) = r^n / Q(r), the algebraically simplified form."""
    q = q_value(profile, r)
    if _is_zero(q):
        raise PoleError(f"Q({r}) = 0: pole of the profile")
    return r ** profile.n / q


def f_value(profile: RadialProfile, r):
    """f(r) = h''/(1 + r h''), computed in the pole-free form h'' * Q / r^n."""
    if not r > 0:
        raise PoleError("f is defined for r > 0 only")
    return h_second(profile, r) * q_value(profile, r) / r ** profile.n


def f_laurent(profile: RadialProfile) -> dict:
    """f(r) as an exact Laurent polynomial {exponent: coefficient}.

    From 1 + r h'' = r^n/Q one gets f = (r^n - Q)/r^(n+1), and r^n - Q is
    just A + B r + C r^(n+1) + D r^(n+2).
    """
    n = profile.n
    return {-(n + 1): profile.A, -n: profile.B, 0: profile.C, 1: profile.D}


def _laurent_derivative(terms: dict) -> dict:
    return {e - 1: c * e for e, c in terms.items() if e != 0}


def _laurent_eval(terms: dict, r):
    return sum(c * r ** e for e, c in terms.items())


def scalar_curvature_radial(profile: RadialProfile, r):
    """Sc(r) = 2(n+1)((n+2) D r + n C) for the radial family.

    The long form 2 r^2 f'' + 4(n+1) r f' + 2 n(n+1) f is evaluated through
    exact differentiation of the Laurent form of f and must agree; a
    disagreement means a broken build, not bad input.
    """
    if not r > 0:
        raise PoleError("Sc(r) is defined for r > 0 only")
    n = profile.n
    affine = 2 * (n + 1) * ((n + 2) * profile.D * r + n * profile.C)
    f0 = f_laurent(profile)
    f1 = _laurent_derivative(f0)
    f2 = _laurent_derivative(f1)
    long_form = (
        2 * r ** 2 * _laurent_eval(f2, r)
        + 4 * (n + 1) * r * _laurent_eval(f1, r)
        + 2 * n * (n + 1) * _laurent_eval(f0, r)
    )
    err = abs(float(long_form) - float(affine))
    if err > 1e-9 * (1.0 + abs(float(affine))):
        raise ArithmeticError(
            f"radial curvature long form disagrees with affine form by {err:.3e}"
        )
    return affine


_CONSTRAINT_RE = re.compile(r"^\s*([ABCD])\s*=\s*([^\s]+)\s*$")
_UNKNOWNS = ("A", "B", "C", "D")


def _parse_constraint(text: str):
    match = _CONSTRAINT_RE.match(text)
    if not match:
        raise ConstraintError(f"cannot parse constraint {text!r} (expected e.g. 'C=0')")
    var, value = match.group(1), _coerce_number(match.group(2))
    if var == "A":
        raise ConstraintError("constraints on A are not part of the family interface")
    if var in ("B", "D") and not _is_zero(value):
        raise ConstraintError(f"only {var}=0 is supported")
    return var, value


def solve_parameters(spec: PolytopeSpec, constraints=()) -> RadialProfile:
    """Solve the 4x4 residue-matching system for (A, B, C, D).

    Bounded specs use the four boundary equations and take no constraints;
    unbounded specs take exactly two constraints from {B=0, C=0, D=0, C=c0}.
    Rational input is solved exactly; float input falls back to a pivoted
    solve with a residual check.
    """
    n, m, a = spec.n, spec.m, spec.a
    rows = []
    rhs = []

    def boundary_rows(t, sign):
        # Q(t) = 0 and Q'(t) = sign * m * t^(n-1), written in the unknowns.
        rows.append([1, t, t ** (n + 1), t ** (n + 2)])
        rhs.append(t ** n)
        rows.append([0, 1, (n + 1) * t ** n, (n + 2) * t ** (n + 1)])
        rhs.append((n - sign * m) * t ** (n - 1))

    boundary_rows(a, +1)
    if spec.bounded:
        if constraints:
            raise ConstraintError("bounded specs determine all four parameters; drop the constraints")
        boundary_rows(spec.b, -1)
    else:
        if len(constraints) != 2:
            raise ConstraintError("unbounded specs need exactly two constraints")
        for text in constraints:
            var, value = _parse_constraint(text)
            row = [0, 0, 0, 0]
            row[_UNKNOWNS.index(var)] = 1
            rows.append(row)
            rhs.append(value)

    if all_rational([v for row in rows for v in row]) and all_rational(rhs):
        solution = solve_exact(rows, rhs)
    else:
        solution = solve_float(rows, rhs)
    return RadialProfile(n, *solution)


def solve_scalar_flat(n, m, a) -> RadialProfile:
    """The scalar-flat profile on the unbounded P^n_m(a): C = D = 0."""
    return solve_parameters(PolytopeSpec(n, m, a), ("C=0", "D=0"))


def solve_kahler_einstein(n, m, a) -> RadialProfile:
    """The Kahler-Einstein profile on P^n_m(a): B = D = 0."""
    return solve_parameters(PolytopeSpec(n, m, a), ("B=0", "D=0"))


def solve_constant_negative(n, m, a) -> RadialProfile:
    """The constant-scalar-curvature profile with C = -1 (Sc = -2n(n+1))."""
    return solve_parameters(PolytopeSpec(n, m, a), ("D=0", "C=-1"))


def ricci_flat_profile(n, a) -> RadialProfile:
    """The m = n degeneration: B = C = D = 0, A = a^n."""
    return solve_parameters(PolytopeSpec(n, n, a), ("B=0", "D=0"))


def fubini_study_profile(n, c=1) -> RadialProfile:
    """(0, 0, C, 0) with C > 0: the metric lives on the simplex of size 1/C."""
    c = _coerce_number(c)
    if not c > 0:
        raise ValueError("Fubini-Study needs C > 0")
    return RadialProfile(n, 0, 0, c, 0)


def bergman_profile(n, c=-1) -> RadialProfile:
    """(0, 0, C, 0) with C < 0: complete on the whole orthant."""
    c = _coerce_number(c)
    if not c < 0:
        raise ValueError("Bergman-type needs C < 0")
    return RadialProfile(n, 0, 0, c, 0)


@dataclass(frozen=True)
class Classification:
    """Curvature flags of a profile plus the affine data of Sc(r)."""

    extremal: bool
    constant_scalar: bool
    scalar_flat: bool
    kahler_einstein: bool
    ricci_flat: bool
    sc_slope: object
    sc_intercept: object

    @property
    def sc_affine(self):
        return (self.sc_slope, self.sc_intercept)

    @property
    def flags(self) -> dict:
        return {
            "extremal": self.extremal,
            "constant_scalar": self.constant_scalar,
            "scalar_flat": self.scalar_flat,
            "kahler_einstein": self.kahler_einstein,
            "ricci_flat": self.ricci_flat,
        }


def classify(profile: RadialProfile) -> Classification:
    """Flags from the vanishing pattern of (B, C, D).

    Exact zero tests for rational entries, |.| < 1e-12 for floats.  Every
    member of the family is extremal; the special conditions are
    constant Sc <=> D=0, scalar-flat <=> C=D=0, Kahler-Einstein <=> B=D=0,
    Ricci-flat <=> B=C=D=0.
    """
    n = profile.n
    zb, zc, zd = _is_zero(profile.B), _is_zero(profile.C), _is_zero(profile.D)
    return Classification(
        extremal=True,
        constant_scalar=zd,
        scalar_flat=zc and zd,
        kahler_einstein=zb and zd,
        ricci_flat=zb and zc and zd,
        sc_slope=2 * (n + 1) * (n + 2) * profile.D,
        sc_intercept=2 * n * (n + 1) * profile.C,
    )


def calabi_polytope(spec: PolytopeSpec) -> PolyhedralSet:
    """P^n_m(a, b) as a facet presentation.

    The orthant facets l_i = x_i plus the labeled radial facets
    l = (r - a)/m and, when bounded, l = (b - r)/m; the 1/m scaling of the
    normals is how the label m is encoded.
    """
    n, m = spec.n, spec.m
    facets = list(orthant(n).facets)
    inv_m = Fraction(1, m)
    a = spec.a if isinstance(spec.a, Rational) else parse_rational(spec.a)
    facets.append(Facet([inv_m] * n, -Fraction(a) / m))
    if spec.bounded:
        b = spec.b if isinstance(spec.b, Rational) else parse_rational(spec.b)
        facets.append(Facet([-inv_m] * n, Fraction(b) / m))
    return PolyhedralSet(n, facets)


def first_pole_beyond(profile: RadialProfile, r0) -> float | None:
    """Smallest real root of Q strictly beyond r0, or None.

    Profiles with C > 0 degenerate at a finite radius even on unbounded
    polytopes; samplers and validators cap the radial coordinate there.
    """
    import numpy as np

    coeffs = np.array([float(c) for c in q_coefficients(profile)])
    nonzero = np.flatnonzero(np.abs(coeffs) > 0)
    if len(nonzero) == 0:
        return None
    coeffs = coeffs[nonzero[0] :]
    if len(coeffs) < 2:
        return None
    roots = np.roots(coeffs)
    scale = 1.0 + abs(float(r0))
    real = roots[np.abs(roots.imag) < 1e-9 * (scale + np.abs(roots))].real
    beyond = real[real > float(r0) * (1 + 1e-12) + 1e-15]
    if len(beyond) == 0:
        return None
    return float(np.min(beyond))


def check_boundary_match(profile: RadialProfile, spec: PolytopeSpec, rel_tol=1e-9) -> None:
    """Raise unless the profile satisfies the residue conditions of spec."""
    n, m = profile.n, spec.m
    if n != spec.n:
        raise ValueError("profile and spec dimensions differ")

    def check(t, sign):
        q = q_value(profile, t)
        qp = q_derivative(profile, t)
        target = sign * m * t ** (n - 1)
        scale = 1.0 + abs(float(t)) ** n
        if abs(float(q)) > rel_tol * scale:
            raise ValueError(f"Q({t}) = {float(q):.3e}, expected 0: profile/spec mismatch")
        if abs(float(qp - target)) > rel_tol * (1.0 + abs(float(target))):
            raise ValueError(
                f"Q'({t}) = {float(qp):.6g}, expected {float(target):.6g}: wrong facet label"
            )

    check(spec.a, +1)
    if spec.bounded:
        check(spec.b, -1)


def build_potential(profile: RadialProfile, spec: PolytopeSpec):
    """The symplectic potential of a solved profile on its polytope.

    Checks the boundary match first (a profile carries a metric for exactly
    one labeled polytope).  The returned potential computes its Hessian from
    h'' directly; h and h' are materialized only for value/gradient calls.
    """
    from .potential import RadialCalabiPotential

    check_boundary_match(profile, spec)
    return RadialCalabiPotential(profile, calabi_polytope(spec))


def h_closed_form(profile: RadialProfile):
    """Closed forms (h, h') by partial fractions of r^(n-1)/Q(r).

    Returns two vectorized callables.  h is pinned down only up to affine
    terms; the choice here drops integration constants and reads logs of
    negative reals through their absolute value, which changes h by an
    affine function only (each real pole keeps a fixed sign of r - p on the
    domain, so derivatives are unaffected).
    """
    import numpy as np
    from scipy.signal import residue

    n = profile.n
    coeffs = [float(c) for c in q_coefficients(profile)]
    exact = q_coefficients(profile)
    if all(c == 0 for c in exact[:-1]) or all(
        _is_zero(v) for v in (profile.A, profile.B, profile.C, profile.D)
    ):
        # Q = r^n: the flat profile, h == 0.
        zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))
        return zero, zero

    # Cancel the common r^c factor between r^(n-1) and Q before the residue
    # call; the Fubini-Study-like profiles have Q = r^n (1 - C r - D r^2).
    trailing = 0
    for c in reversed(exact):
        if c == 0:
            trailing += 1
        else:
            break
    cancel = min(trailing, n - 1)
    num = [1.0] + [0.0] * (n - 1 - cancel)
    den = coeffs[: len(coeffs) - cancel]
    residues, poles, direct = residue(num, den)
    if len(direct) and any(abs(k) > 1e-12 for k in direct):
        raise ArithmeticError("r^(n-1)/Q must be a proper fraction")

    terms = []  # (residue, pole, power)
    prev = None
    power = 0
    for rho, p in zip(residues, poles):
        if prev is not None and abs(p - prev) <= 1e-8 * (1.0 + abs(p)):
            power += 1
        else:
            power = 1
        prev = p
        terms.append((complex(rho), complex(p), power))

    def h_prime(r):
        r = np.asarray(r, dtype=float)
        total = -np.log(r).astype(complex)
        for rho, p, k in terms:
            d = r - p
            if k == 1:
                total = total + rho * np.log(d)
            else:
                total = total + rho * d ** (1 - k) / (1 - k)
        return total.real if total.ndim else float(total.real)

    def h_val(r):
        r = np.asarray(r, dtype=float)
        total = -(r * np.log(r) - r).astype(complex)
        for rho, p, k in terms:
            d = r - p
            if k == 1:
                total = total + rho * (d * np.log(d) - d)
            elif k == 2:
                total = total - rho * np.log(d)
            else:
                total = total + rho * d ** (2 - k) / ((1 - k) * (2 - k))
        return total.real if total.ndim else float(total.real)

    return h_val, h_prime


def profile_to_json_dict(profile: RadialProfile) -> dict:
    def fmt(v):
        return format_rational(v) if isinstance(v, Rational) else float(v)

    return {
        "n": profile.n,
        "A": fmt(profile.A),
        "B": fmt(profile.B),
        "C": fmt(profile.C),
        "D": fmt(profile.D),
    }


def profile_from_json_dict(data: dict) -> RadialProfile:
    try:
        return RadialProfile(data["n"], data["A"], data["B"], data["C"], data["D"])
    except KeyError as exc:
        raise ValueError(f"profile document is missing {exc}") from None


def spec_to_json_dict(spec: PolytopeSpec) -> dict:
    def fmt(v):
        return format_rational(v) if isinstance(v, Rational) else float(v)

    return {
        "n": spec.n,
        "m": spec.m,
        "a": fmt(spec.a),
        "b": None if spec.b is None else fmt(spec.b),
    }


def spec_from_json_dict(data: dict) -> PolytopeSpec:
    try:
        return PolytopeSpec(data["n"], data["m"], data["a"], data.get("b"))
    except KeyError as exc:
        raise ValueError(f"spec document is missing {exc}") from None


def classification_to_json_dict(c: Classification) -> dict:
    def fmt(v):
        return format_rational(v) if isinstance(v, Rational) else float(v)

    return {
        "extremal": c.extremal,
        "constant_scalar": c.constant_scalar,
        "scalar_flat": c.scalar_flat,
        "kahler_einstein": c.kahler_einstein,
        "ricci_flat": c.ricci_flat,
        "sc_slope": fmt(c.sc_slope),
        "sc_intercept": fmt(c.sc_intercept),
    }
