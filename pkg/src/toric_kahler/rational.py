"""Exact rational arithmetic helpers: parsing, formatting, small dense solves.

Everything here works on ``fractions.Fraction``.  The systems that matter are
tiny (4x4 boundary systems, nxn changes of coordinates with n <= 8), so a
plain fraction-free-ish Gauss elimination is both exact and fast enough.
Float inputs fall back to a pivoted float solve with a residual check.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class SingularMatrixError(ValueError):
    """The coefficient matrix is (numerically) singular."""


def parse_rational(value) -> Fraction:
    """Parse an exact rational from "p/q" strings, ints, Fractions or floats.

    Floats are read through their decimal repr, so a JSON 0.1 becomes 1/10
    rather than the binary 3602879701896397/36028797018963968.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(q: Fraction) -> str:
    """Render a Fraction as "p" or "p/q" (used by the JSON interfaces)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def is_rational(value) -> bool:
    return isinstance(value, Rational) and not isinstance(value, bool)


def all_rational(values) -> bool:
    return all(is_rational(v) for v in values)


def solve_exact(matrix, rhs):
    """Solve A x = b exactly over the rationals by Gauss elimination.

    `matrix` is a list of rows, `rhs` a list; all entries Fraction-coercible.
    Raises SingularMatrixError when A has no unique solution.
    """
    n = len(matrix)
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    if any(len(row) != n + 1 for row in a):
        raise ValueError("solve_exact needs a square system")
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if a[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            raise SingularMatrixError(f"singular system (no pivot in column {col})")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
        pv = a[col][col]
        for r in range(n):
            if r == col:
                continue
            factor = a[r][col] / pv
            if factor == 0:
                continue
            for c in range(col, n + 1):
                a[r][c] -= factor * a[col][c]
    return [a[r][n] / a[r][r] for r in range(n)]


def solve_float(matrix, rhs, residual_tol: float = 1e-12):
    """Partial-pivot float solve with a residual check <= residual_tol * ||b||."""
    import numpy as np

    a = np.asarray(matrix, dtype=float)
    b = np.asarray(rhs, dtype=float)
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from None
    scale = max(float(np.max(np.abs(b))), 1.0)
    residual = float(np.max(np.abs(a @ x - b)))
    if not np.all(np.isfinite(x)) or residual > residual_tol * scale:
        raise SingularMatrixError(f"float solve residual {residual:.3e} exceeds tolerance")
    return [float(v) for v in x]


def invert_exact(matrix):
    """Exact inverse of a square rational matrix (Gauss-Jordan)."""
    n = len(matrix)
    a = [[Fraction(v) for v in row] for row in matrix]
    if any(len(row) != n for row in a):
        raise ValueError("invert_exact needs a square matrix")
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if a[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            raise SingularMatrixError("matrix is singular")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        inv[col] = [v / pv for v in inv[col]]
        for r in range(n):
            if r == col:
                continue
            factor = a[r][col]
            if factor == 0:
                continue
            a[r] = [v - factor * w for v, w in zip(a[r], a[col])]
            inv[r] = [v - factor * w for v, w in zip(inv[r], inv[col])]
    return inv


def det_exact(matrix) -> Fraction:
    """Exact determinant by elimination (rationals stay rational)."""
    n = len(matrix)
    a = [[Fraction(v) for v in row] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if a[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        pv = a[col][col]
        det *= pv
        for r in range(col + 1, n):
            factor = a[r][col] / pv
            if factor == 0:
                continue
            for c in range(col, n):
                a[r][c] -= factor * a[col][c]
    return det
