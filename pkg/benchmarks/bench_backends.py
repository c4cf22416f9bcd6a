"""Time the batch kernels under both backends.

Runs each kernel on synthetic batches and prints a numpy vs numba table.
The numba column needs numba importable; a warmup call keeps JIT compile
time out of the measurements.

    python3 benchmarks/bench_backends.py --sizes 1024 16384 --repeats 7
"""

import argparse
import os
import time

import numpy as np

from toric_kahler.backend import kernels
from toric_kahler.calabi import PolytopeSpec, q_coefficients, solve_parameters
from toric_kahler.polytope import simplex


def _batch_points(size, dim, rng):
    # positive coordinates with radius inside the (1, 2) band
    raw = rng.dirichlet(np.ones(dim), size=size)
    radii = rng.uniform(1.05, 1.95, size=size)
    return raw * radii[:, None]


def _cases(size, dim, rng):
    P = simplex(dim)
    normals = np.array([[float(c) for c in f.normal] for f in P.facets])
    offsets = np.array([float(f.offset) for f in P.facets])
    simplex_pts = rng.dirichlet(np.ones(dim + 1), size=size)[:, :dim] * 0.98 + 0.01 / dim
    band_pts = _batch_points(size, dim, rng)
    profile = solve_parameters(PolytopeSpec(dim, 1, 1, 2), ())
    qc = np.array([float(c) for c in q_coefficients(profile)])
    mats = kernels().log_hessians(simplex_pts, normals, offsets)
    return [
        ("affine_values", (simplex_pts, normals, offsets)),
        ("log_hessians", (simplex_pts, normals, offsets)),
        ("radial_hessians", (band_pts, qc, dim)),
        ("radial_inverse", (band_pts, qc, dim)),
        ("pd_flags", (mats,)),
    ]


def _time(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1024, 16384])
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args(argv)

    backends = ["numpy"]
    try:
        import numba  # noqa: F401

        backends.append("numba")
    except ImportError:
        print("numba not importable; timing the numpy backend only")

    rng = np.random.default_rng(0)
    rows = []
    for size in args.sizes:
        cases = _cases(size, args.dim, rng)
        for name, call_args in cases:
            timings = {}
            for backend in backends:
                os.environ["TORIC_KAHLER_BACKEND"] = backend
                fn = getattr(kernels(), name)
                fn(*call_args)  # warmup; compiles under numba
                timings[backend] = _time(fn, call_args, args.repeats)
            rows.append((name, size, timings))
    os.environ.pop("TORIC_KAHLER_BACKEND", None)

    header = f"{'kernel':<16} {'batch':>7} {'numpy (ms)':>11}"
    if "numba" in backends:
        header += f" {'numba (ms)':>11} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, size, timings in rows:
        line = f"{name:<16} {size:>7} {timings['numpy'] * 1e3:>11.3f}"
        if "numba" in timings:
            ratio = timings["numpy"] / timings["numba"] if timings["numba"] > 0 else float("inf")
            line += f" {timings['numba'] * 1e3:>11.3f} {ratio:>7.2f}x"
        print(line)


if __name__ == "__main__":
    main()
