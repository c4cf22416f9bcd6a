"""Batch numeric kernels: numpy reference implementations plus numba twins.

These are the hot paths: assembling Hessians of log/radial potentials on
thousands of stencil points, the closed-form radial inverse, and Cholesky
positive-definiteness sweeps.  The numpy versions are fully vectorized and
are the fallback; the numba versions are plain loops compiled with @njit.
Backend selection lives in backend.py (TORIC_KAHLER_BACKEND).

All kernels take float64 arrays: points (m, n), facet normals (F, n) with
offsets (F,), and radial profiles as descending Q coefficients (n+3,).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------


def affine_values_numpy(points, normals, offsets):
    return points @ normals.T + offsets


def log_hessians_numpy(points, normals, offsets):
    """Hessians of (1/2) sum_f l_f log l_f: (1/2) sum_f nu nu^T / l_f."""
    values = points @ normals.T + offsets
    weights = 0.5 / values
    return np.einsum("mf,fi,fj->mij", weights, normals, normals)


def _q_polyval_numpy(qcoeffs, r):
    out = np.zeros_like(r)
    for c in qcoeffs:
        out = out * r + c
    return out


def radial_hessians_numpy(points, qcoeffs, n):
    """Hessians of (1/2)(sum x log x + h(r)): (1/2)(diag(1/x) + h'' 11^T)."""
    m, dim = points.shape
    r = points.sum(axis=1)
    q = _q_polyval_numpy(qcoeffs, r)
    hsec = -1.0 / r + r ** (n - 1) / q
    hess = np.zeros((m, dim, dim))
    idx = np.arange(dim)
    hess[:, idx, idx] = 0.5 / points
    hess += 0.5 * hsec[:, None, None]
    return hess


def radial_inverse_numpy(points, qcoeffs, n):
    """Closed-form inverse and determinant of the radial Hessian.

    S^{-1}_{ij} = 2 (delta_ij x_i - x_i x_j f(r)) with f = (r^n - Q)/r^{n+1},
    Det S = r^n / (Q(r) 2^n x_1 ... x_n).
    """
    m, dim = points.shape
    r = points.sum(axis=1)
    q = _q_polyval_numpy(qcoeffs, r)
    f = (r ** n - q) / r ** (n + 1)
    inv = -2.0 * f[:, None, None] * points[:, :, None] * points[:, None, :]
    idx = np.arange(dim)
    inv[:, idx, idx] += 2.0 * points
    det = r ** n / (q * 2.0 ** dim * points.prod(axis=1))
    return inv, det


def pd_flags_numpy(mats):
    """True where the symmetric matrix is positive definite (and finite)."""
    m = mats.shape[0]
    flags = np.zeros(m, dtype=np.bool_)
    finite = np.isfinite(mats).all(axis=(1, 2))
    if finite.any():
        eigs = np.linalg.eigvalsh(mats[finite])
        flags[finite] = eigs[:, 0] > 0.0
    return flags


# ---------------------------------------------------------------------------
# numba twins (same contracts, loop style)
# ---------------------------------------------------------------------------


@njit(cache=True)
def affine_values_numba(points, normals, offsets):
    m = points.shape[0]
    fcount = normals.shape[0]
    n = points.shape[1]
    out = np.empty((m, fcount))
    for p in range(m):
        for f in range(fcount):
            acc = offsets[f]
            for j in range(n):
                acc += normals[f, j] * points[p, j]
            out[p, f] = acc
    return out


@njit(cache=True)
def log_hessians_numba(points, normals, offsets):
    m = points.shape[0]
    fcount = normals.shape[0]
    n = points.shape[1]
    out = np.zeros((m, n, n))
    for p in range(m):
        for f in range(fcount):
            l = offsets[f]
            for j in range(n):
                l += normals[f, j] * points[p, j]
            w = 0.5 / l
            for i in range(n):
                wni = w * normals[f, i]
                for j in range(n):
                    out[p, i, j] += wni * normals[f, j]
    return out


@njit(cache=True)
def radial_hessians_numba(points, qcoeffs, n):
    m = points.shape[0]
    dim = points.shape[1]
    out = np.empty((m, dim, dim))
    for p in range(m):
        r = 0.0
        for j in range(dim):
            r += points[p, j]
        q = 0.0
        for c in qcoeffs:
            q = q * r + c
        hsec = -1.0 / r + r ** (n - 1) / q
        half = 0.5 * hsec
        for i in range(dim):
            for j in range(dim):
                out[p, i, j] = half
            out[p, i, i] += 0.5 / points[p, i]
    return out


@njit(cache=True)
def radial_inverse_numba(points, qcoeffs, n):
    m = points.shape[0]
    dim = points.shape[1]
    inv = np.empty((m, dim, dim))
    det = np.empty(m)
    for p in range(m):
        r = 0.0
        prod = 1.0
        for j in range(dim):
            r += points[p, j]
            prod *= points[p, j]
        q = 0.0
        for c in qcoeffs:
            q = q * r + c
        f = (r ** n - q) / r ** (n + 1)
        for i in range(dim):
            for j in range(dim):
                inv[p, i, j] = -2.0 * f * points[p, i] * points[p, j]
            inv[p, i, i] += 2.0 * points[p, i]
        det[p] = r ** n / (q * 2.0 ** dim * prod)
    return inv, det


@njit(cache=True)
def pd_flags_numba(mats):
    m = mats.shape[0]
    n = mats.shape[1]
    flags = np.zeros(m, dtype=np.bool_)
    chol = np.empty((n, n))
    for p in range(m):
        ok = True
        for i in range(n):
            for j in range(n):
                if not np.isfinite(mats[p, i, j]):
                    ok = False
        if not ok:
            continue
        # plain Cholesky; fails exactly when the matrix is not PD
        for i in range(n):
            for j in range(i + 1):
                acc = mats[p, i, j]
                for k in range(j):
                    acc -= chol[i, k] * chol[j, k]
                if i == j:
                    if acc <= 0.0 or not np.isfinite(acc):
                        ok = False
                        break
                    chol[i, i] = np.sqrt(acc)
                else:
                    chol[i, j] = acc / chol[j, j]
            if not ok:
                break
        flags[p] = ok
    return flags
