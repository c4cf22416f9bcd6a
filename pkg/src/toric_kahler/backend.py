"""Kernel backend selection.

TORIC_KAHLER_BACKEND picks the batch-kernel implementation: "numba" (the
default when numba imports) or "numpy" (pure vectorized fallback).  The
choice is read per call, so tests can flip the variable without reloading.
TORIC_KAHLER_THREADS caps the numba thread pool.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

from . import _kernels

_KERNEL_NAMES = (
    "affine_values",
    "log_hessians",
    "radial_hessians",
    "radial_inverse",
    "pd_flags",
)

_NUMPY_KERNELS = SimpleNamespace(
    **{name: getattr(_kernels, name + "_numpy") for name in _KERNEL_NAMES}
)

if _kernels.HAS_NUMBA:
    _NUMBA_KERNELS = SimpleNamespace(
        **{name: getattr(_kernels, name + "_numba") for name in _KERNEL_NAMES}
    )
else:  # pragma: no cover
    _NUMBA_KERNELS = None

_threads_applied = False


def _apply_thread_cap():
    global _threads_applied
    if _threads_applied or not _kernels.HAS_NUMBA:
        return
    _threads_applied = True
    raw = os.environ.get("TORIC_KAHLER_THREADS")
    if not raw:
        return
    import numba

    count = max(1, min(int(raw), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(count)


def backend_name() -> str:
    """Resolve the active backend from the environment."""
    raw = os.environ.get("TORIC_KAHLER_BACKEND", "").strip().lower()
    if raw in ("numba", "numpy"):
        if raw == "numba" and not _kernels.HAS_NUMBA:
            raise RuntimeError(
                "TORIC_KAHLER_BACKEND=numba but numba is not importable"
            )
        return raw
    if raw:
        raise ValueError(
            f"unknown TORIC_KAHLER_BACKEND {raw!r}; expected 'numba' or 'numpy'"
        )
    return "numba" if _kernels.HAS_NUMBA else "numpy"


def kernels() -> SimpleNamespace:
    """Kernel namespace for the active backend."""
    if backend_name() == "numba":
        _apply_thread_cap()
        return _NUMBA_KERNELS
    return _NUMPY_KERNELS
