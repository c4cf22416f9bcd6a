import math
from fractions import Fraction

import numpy as np
import pytest

from toric_kahler.calabi import (
    PoleError,
    PolytopeSpec,
    bergman_profile,
    build_potential,
    fubini_study_profile,
    q_value,
    solve_kahler_einstein,
    solve_parameters,
    solve_scalar_flat,
)
from toric_kahler.numdiff import fd_gradient, fd_hessian
from toric_kahler.polytope import (
    DomainError,
    LinearChange,
    exact_facets_equal,
    interval,
    orthant,
    simplex,
    transform,
)
from toric_kahler.potential import (
    CanonicalPotential,
    RadialCalabiPotential,
    SmoothCorrectionPotential,
    SumPotential,
    TransformedPotential,
    canonical_potential,
    complex_coordinates,
    potential_from_json_dict,
    potential_to_json_dict,
    radial_inverse_hessian,
    transform_potential,
)


def bounded_radial():
    spec = PolytopeSpec(2, 1, 1, 2)
    return build_potential(solve_parameters(spec, ()), spec)


# ---------------------------------------------------------------------------
# canonical potentials
# ---------------------------------------------------------------------------


def test_orthant_canonical_hessian_is_diagonal():
    s = canonical_potential(orthant(2))
    sample = s.hessian((0.5, 0.25))
    assert np.allclose(sample.S, np.diag([1.0, 2.0]), atol=1e-14)
    assert sample.det_S == pytest.approx(2.0)
    assert np.allclose(sample.S @ sample.S_inv, np.eye(2), atol=1e-12)


def test_simplex_canonical_hessian_at_center():
    s = canonical_potential(simplex(2))
    S = s.hessian_matrix((1 / 3, 1 / 3))
    assert np.allclose(S, [[3.0, 1.5], [1.5, 3.0]], atol=1e-12)
    # determinant law: det S * prod l_i = 2^-n
    det = np.linalg.det(S)
    assert det * (1 / 3) ** 3 == pytest.approx(0.25, rel=1e-12)


def test_canonical_value_and_gradient():
    s = canonical_potential(simplex(2))
    x = (0.2, 0.3)
    ells = [0.2, 0.3, 0.5]
    assert s.value(x) == pytest.approx(0.5 * sum(l * math.log(l) for l in ells))
    assert np.allclose(s.gradient(x), fd_gradient(s.value, np.array(x), 1e-6), atol=1e-9)


def test_canonical_boundary_value_extends_by_zero():
    s = canonical_potential(simplex(2))
    assert s.value((0.0, 0.0)) == pytest.approx(0.0)  # 0 log 0 -> 0
    with pytest.raises(DomainError):
        s.value((-0.1, 0.2))
    with pytest.raises(DomainError):
        s.hessian((0.6, 0.6))


def test_canonical_rejects_empty_interior():
    from toric_kahler.polytope import Facet, PolyhedralSet

    empty = PolyhedralSet(1, [Facet([1], 0), Facet([-1], 0)])
    with pytest.raises(DomainError):
        canonical_potential(empty)


# ---------------------------------------------------------------------------
# radial family potentials
# ---------------------------------------------------------------------------


def test_zero_profile_equals_orthant_canonical():
    from toric_kahler.calabi import RadialProfile

    zero = RadialCalabiPotential(RadialProfile(2, 0, 0, 0, 0), orthant(2))
    flat = canonical_potential(orthant(2))
    for x in [(0.3, 0.9), (1.5, 0.2)]:
        assert np.allclose(zero.hessian_matrix(x), flat.hessian_matrix(x), atol=1e-13)


def test_fubini_study_profile_matches_simplex_canonical():
    fs = RadialCalabiPotential(fubini_study_profile(2), simplex(2))
    can = canonical_potential(simplex(2))
    for x in [(0.2, 0.3), (0.5, 0.1), (0.25, 0.7)]:
        assert np.allclose(fs.hessian_matrix(x), can.hessian_matrix(x), atol=1e-12)
    # the two potentials differ by an affine function: constant gradient gap
    gaps = [np.asarray(fs.gradient(x)) - np.asarray(can.gradient(x)) for x in [(0.2, 0.3), (0.4, 0.4)]]
    assert np.allclose(gaps[0], gaps[1], atol=1e-10)


def test_radial_value_gradient_hessian_consistency():
    s = bounded_radial()
    x = np.array([0.7, 0.6])
    assert np.allclose(s.gradient(x), fd_gradient(s.value, x, 1e-7), atol=1e-7)
    # step large enough that roundoff in the second differences stays small
    H = fd_hessian(s.value, x, 2e-3)
    assert np.allclose(H, s.hessian_matrix(x), rtol=1e-6, atol=1e-8)


def test_radial_inverse_closed_form():
    spec = PolytopeSpec(2, 1, 1, 2)
    profile = solve_parameters(spec, ())
    s = build_potential(profile, spec)
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = rng.uniform(0.1, 0.9, size=2)
        x *= rng.uniform(1.05, 1.95) / x.sum()
        sample = radial_inverse_hessian(profile, x)
        S = s.hessian_matrix(x)
        assert np.allclose(S @ sample.S_inv, np.eye(2), atol=1e-11)
        # Det S = r^n / (Q * 2^n * prod x)
        r = x.sum()
        expected = r**2 / (float(q_value(profile, r)) * 4.0 * x.prod())
        assert sample.det_S == pytest.approx(expected, rel=1e-12)


def test_radial_inverse_degenerate_region_raises():
    ke = solve_kahler_einstein(3, 1, 1)
    # beyond the first pole 1 + r h'' goes negative
    x = np.array([0.7, 0.7, 0.7])  # r = 2.1 > 1.839...
    with pytest.raises(PoleError):
        radial_inverse_hessian(ke, x)


def test_sampling_domain_caps_at_pole():
    spec = PolytopeSpec(3, 1, 1)
    s = build_potential(solve_kahler_einstein(3, 1, 1), spec)
    capped = s.sampling_domain()
    assert len(capped.facets) == len(s.domain.facets) + 1
    cap = capped.facets[-1]
    assert cap.normal == (-1, -1, -1)
    assert float(cap.offset) == pytest.approx(1.8392867552141623, rel=1e-9)
    # scalar-flat profiles have no pole: sampling domain unchanged
    sf = build_potential(solve_scalar_flat(2, 1, 1), PolytopeSpec(2, 1, 1))
    assert sf.sampling_domain() is sf.domain


def test_bergman_profile_positive_everywhere():
    s = RadialCalabiPotential(bergman_profile(2), orthant(2))
    for x in [(0.5, 0.5), (3.0, 4.0)]:
        evals = np.linalg.eigvalsh(s.hessian_matrix(x))
        assert evals.min() > 0


# ---------------------------------------------------------------------------
# sums, corrections, transforms
# ---------------------------------------------------------------------------


def test_smooth_correction_quadratic():
    s = SmoothCorrectionPotential([0, 0, 1], orthant(2))  # p(r) = r^2
    x = (0.4, 0.9)
    r = sum(x)
    assert s.value(x) == pytest.approx(0.5 * r**2)
    assert np.allclose(s.gradient(x), [r, r])
    assert np.allclose(s.hessian_matrix(x), np.ones((2, 2)))


def test_sum_potential_additivity():
    base = canonical_potential(orthant(2))
    bump = SmoothCorrectionPotential([0, 0, 1], orthant(2))
    total = SumPotential([base, bump])
    x = (0.3, 0.8)
    assert total.value(x) == pytest.approx(base.value(x) + bump.value(x))
    assert np.allclose(
        total.hessian_matrix(x),
        base.hessian_matrix(x) + bump.hessian_matrix(x),
        atol=1e-13,
    )


def test_transform_canonical_is_exact_pullback():
    T = LinearChange([[1, 1], [0, 1]])
    s = canonical_potential(simplex(2))
    pulled = transform_potential(s, T)
    assert isinstance(pulled, CanonicalPotential)
    assert exact_facets_equal(pulled.domain, transform(simplex(2), T))
    y = (0.1, 0.2)
    x = tuple(float(v) for v in T.apply(y))
    assert pulled.value(y) == pytest.approx(s.value(x), rel=1e-14)


def test_transform_congruence_identity():
    T = LinearChange([[2, 1], [1, 1]])
    s = bounded_radial()
    pulled = transform_potential(s, T)
    y = np.array([0.1, 0.5])  # maps to (0.7, 0.6), inside the 1 <= r <= 2 band
    x = np.array([float(v) for v in T.apply(y)])
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    assert np.allclose(
        pulled.hessian_matrix(y), M.T @ s.hessian_matrix(x) @ M, atol=1e-11
    )
    # independent check: FD of the pulled value reproduces its Hessian
    H = fd_hessian(pulled.value, y, 1e-5)
    assert np.allclose(H, pulled.hessian_matrix(y), rtol=1e-5, atol=1e-7)


def test_transform_composition_collapses():
    T = LinearChange([[1, 1], [0, 1]])
    s = bounded_radial()
    twice = transform_potential(transform_potential(s, T), T)
    assert isinstance(twice, TransformedPotential)
    assert twice.inner is s
    assert twice.change.matrix == T.compose(T).matrix


def test_complex_coordinates():
    s = canonical_potential(simplex(1))
    z = complex_coordinates(s, (0.5,), (0.7,))
    assert z[0].real == pytest.approx(0.0, abs=1e-14)  # symmetric point
    assert z[0].imag == pytest.approx(0.7)
    with pytest.raises(DomainError):
        complex_coordinates(s, (0.5,), (0.1, 0.2))


# ---------------------------------------------------------------------------
# batching and serialization
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "maker",
    [
        lambda: canonical_potential(simplex(2)),
        bounded_radial,
        lambda: transform_potential(bounded_radial(), LinearChange([[2, 1], [1, 1]])),
        lambda: SumPotential(
            [canonical_potential(orthant(2)), SmoothCorrectionPotential([0, 0, 1], orthant(2))]
        ),
    ],
)
def test_batch_hessian_matches_loop(maker):
    s = maker()
    from toric_kahler.curvature import sample_interior

    points = sample_interior(s.sampling_domain(), 6, seed=2)
    batch = s.batch_hessian(points)
    singles = np.stack([s.hessian_matrix(p) for p in points])
    assert np.allclose(batch, singles, atol=1e-12)


def test_potential_json_roundtrips():
    potentials = [
        canonical_potential(simplex(2)),
        bounded_radial(),
        SumPotential(
            [canonical_potential(orthant(2)), SmoothCorrectionPotential([0, 0, 1], orthant(2))]
        ),
        transform_potential(bounded_radial(), LinearChange([[1, 1], [0, 1]])),
    ]
    probes = [(0.3, 0.4), (0.7, 0.6), (0.3, 0.4), (0.1, 0.6)]
    for s, x in zip(potentials, probes):
        back = potential_from_json_dict(potential_to_json_dict(s))
        assert exact_facets_equal(back.domain, s.domain)
        assert np.allclose(back.hessian_matrix(x), s.hessian_matrix(x), atol=1e-13)
        assert back.value(x) == pytest.approx(s.value(x), rel=1e-13)


def test_dim2_potential_json_roundtrip():
    from toric_kahler.dim2 import classify_dim2, potential_dim2

    s = potential_dim2(classify_dim2(1, 0, 1))
    back = potential_from_json_dict(potential_to_json_dict(s))
    assert back.s_double_prime(0.3) == pytest.approx(s.s_double_prime(0.3), rel=1e-14)


def test_point_validation():
    s = canonical_potential(simplex(2))
    with pytest.raises(DomainError):
        s.hessian((0.1,))
    with pytest.raises(DomainError):
        s.value((float("nan"), 0.2))
