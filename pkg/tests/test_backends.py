import numpy as np
import pytest

from toric_kahler import _kernels
from toric_kahler.backend import _KERNEL_NAMES, backend_name, kernels
from toric_kahler.calabi import PolytopeSpec, q_coefficients, solve_parameters
from toric_kahler.polytope import simplex
from toric_kahler.potential import canonical_potential


needs_numba = pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba unavailable")


def _random_interior(rng, count):
    # points in the open trapezoid 1 < r < 2, x > 0
    x = rng.uniform(0.1, 0.9, size=(count, 2))
    scale = rng.uniform(1.05, 1.95, size=count) / x.sum(axis=1)
    return x * scale[:, None]


def test_backend_env_selection(monkeypatch):
    monkeypatch.setenv("TORIC_KAHLER_BACKEND", "numpy")
    assert backend_name() == "numpy"
    assert kernels().pd_flags is _kernels.pd_flags_numpy
    monkeypatch.delenv("TORIC_KAHLER_BACKEND")
    assert backend_name() in ("numba", "numpy")


def test_backend_rejects_unknown(monkeypatch):
    monkeypatch.setenv("TORIC_KAHLER_BACKEND", "fortran")
    with pytest.raises(ValueError):
        backend_name()


@needs_numba
def test_backend_numba_available(monkeypatch):
    monkeypatch.setenv("TORIC_KAHLER_BACKEND", "numba")
    assert backend_name() == "numba"
    assert kernels().pd_flags is _kernels.pd_flags_numba


@needs_numba
def test_kernel_parity_affine_and_log():
    rng = np.random.default_rng(11)
    points = rng.uniform(0.05, 0.8, size=(40, 2))
    normals = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    offsets = np.array([0.0, 0.0, 2.0])
    a = _kernels.affine_values_numpy(points, normals, offsets)
    b = _kernels.affine_values_numba(points, normals, offsets)
    assert np.allclose(a, b, atol=1e-14)
    ha = _kernels.log_hessians_numpy(points, normals, offsets)
    hb = _kernels.log_hessians_numba(points, normals, offsets)
    assert np.allclose(ha, hb, atol=1e-12)


@needs_numba
def test_kernel_parity_radial():
    rng = np.random.default_rng(7)
    points = _random_interior(rng, 50)
    profile = solve_parameters(PolytopeSpec(2, 1, 1, 2), ())
    qc = np.array([float(c) for c in q_coefficients(profile)])
    ha = _kernels.radial_hessians_numpy(points, qc, 2)
    hb = _kernels.radial_hessians_numba(points, qc, 2)
    assert np.allclose(ha, hb, atol=1e-12)
    inv_a, det_a = _kernels.radial_inverse_numpy(points, qc, 2)
    inv_b, det_b = _kernels.radial_inverse_numba(points, qc, 2)
    assert np.allclose(inv_a, inv_b, atol=1e-12)
    assert np.allclose(det_a, det_b, rtol=1e-12)
    # the two closed forms are mutually inverse
    assert np.allclose(np.einsum("mij,mjk->mik", ha, inv_a), np.eye(2), atol=1e-10)


@needs_numba
def test_kernel_parity_pd_flags():
    mats = np.stack(
        [
            np.eye(2),
            -np.eye(2),
            np.array([[1.0, 2.0], [2.0, 1.0]]),  # indefinite
            np.full((2, 2), np.nan),
            np.array([[2.0, 0.5], [0.5, 1.0]]),
        ]
    )
    a = _kernels.pd_flags_numpy(mats)
    b = _kernels.pd_flags_numba(mats)
    assert a.tolist() == [True, False, False, False, True]
    assert a.tolist() == b.tolist()


def test_kernel_names_complete():
    for name in _KERNEL_NAMES:
        assert hasattr(_kernels, name + "_numpy")


@needs_numba
def test_batch_hessian_same_on_both_backends(monkeypatch):
    s = canonical_potential(simplex(2))
    pts = np.array([[0.2, 0.3], [0.4, 0.1], [0.25, 0.5]])
    monkeypatch.setenv("TORIC_KAHLER_BACKEND", "numpy")
    via_numpy = s.batch_hessian(pts)
    monkeypatch.setenv("TORIC_KAHLER_BACKEND", "numba")
    via_numba = s.batch_hessian(pts)
    assert np.allclose(via_numpy, via_numba, atol=1e-13)
