"""Central finite differences for scalar fields on polytope interiors.

Used for the independent consistency checks: differentiating potential
values back into gradients/Hessians, and differentiating inverse-Hessian
entries for the general curvature route.  Second order stencils, with an
optional single Richardson sweep (4 H(h/2) - H(h)) / 3 for the Hessian.
"""

from __future__ import annotations

import numpy as np


def fd_gradient(fn, x, step):
    x = np.asarray(x, dtype=float)
    n = x.size
    grad = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        grad[i] = (fn(x + e) - fn(x - e)) / (2.0 * step)
    return grad


def _fd_hessian_once(fn, x, step):
    n = x.size
    hess = np.empty((n, n))
    f0 = fn(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step
        hess[i, i] = (fn(x + ei) - 2.0 * f0 + fn(x - ei)) / step**2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = step
            cross = (
                fn(x + ei + ej)
                - fn(x + ei - ej)
                - fn(x - ei + ej)
                + fn(x - ei - ej)
            ) / (4.0 * step**2)
            hess[i, j] = cross
            hess[j, i] = cross
    return hess


def fd_hessian(fn, x, step, richardson=True):
    x = np.asarray(x, dtype=float)
    coarse = _fd_hessian_once(fn, x, step)
    if not richardson:
        return coarse
    fine = _fd_hessian_once(fn, x, step / 2.0)
    return (4.0 * fine - coarse) / 3.0
