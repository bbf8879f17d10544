import math

import numpy as np
import pytest

from lpvariance import projest
from lpvariance.oracle_quad import quad_moments_projection
from lpvariance.projest import (DegenerateWeight, ProjectedBodySpec, estimate_ef, hyperplane_basis,
                                largest_eigenvalue, theoretical_scale, variance_report)
from lpvariance.weights import Direction


def _ball_closed_forms(n):
    m = n - 1
    e2, e4, lam = m / (m + 2), m / (m + 4), 1 / (m + 2)
    return e2, e4 - e2 ** 2, lam


def test_hyperplane_basis_orthonormal():
    for theta in (Direction.diag(5).theta, Direction.axis(3, 0).theta, Direction.of([1, -2, 0.3]).theta):
        b = hyperplane_basis(theta)
        assert b.shape == (theta.size - 1, theta.size)
        np.testing.assert_allclose(b @ b.T, np.eye(theta.size - 1), atol=1e-14)
        np.testing.assert_allclose(b @ theta, 0, atol=1e-14)


def test_largest_eigenvalue():
    assert largest_eigenvalue(np.eye(4)) == pytest.approx(1.0)
    assert largest_eigenvalue(np.diag([1.0, 2.0, 5.0])) == pytest.approx(5.0)
    v = np.array([1.0, 1.0, 1.0])
    assert largest_eigenvalue(np.outer(v, v)) == pytest.approx(3.0, rel=1e-10)
    with pytest.raises(ValueError):
        largest_eigenvalue(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_theoretical_scale():
    d16, d3 = Direction.diag(16), Direction.axis(3, 2)
    assert theoretical_scale(ProjectedBodySpec(4.0, 16, d16)) == 1.0
    assert theoretical_scale(ProjectedBodySpec(1.0, 16, d16)) == pytest.approx(16.0 ** -3)
    s = theoretical_scale(ProjectedBodySpec(2.0, 3, d3))
    assert s == pytest.approx(1 / 3)
    assert 0.1 <= (0.25 * 0.5) / s <= 10


def test_spec_validation():
    with pytest.raises(ValueError):
        ProjectedBodySpec(2.0, 4, Direction.diag(3))
    with pytest.raises(ValueError):
        ProjectedBodySpec(0.5, 3, Direction.diag(3))


def test_ef_constant_is_exact(stream):
    spec = ProjectedBodySpec(3.0, 4, Direction.haar(stream.child(0), 4))
    est = estimate_ef(spec, lambda x: np.ones(len(x)), 100_000, stream.child(1))
    assert est.mean == 1.0 and est.stderr == 0.0


def test_ef_disk(stream):
    spec = ProjectedBodySpec(2.0, 3, Direction.axis(3, 2))
    est = estimate_ef(spec, lambda x: (x * x).sum(1), 500_000, stream)
    assert est.within(0.5)


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_ef_matches_quadrature(stream, p):
    d = Direction.haar(stream.child(0), 3)
    f = lambda x: (x * x).sum(1)
    oracle = quad_moments_projection(p, 3, d, f).value
    est = estimate_ef(ProjectedBodySpec(p, 3, d), f, 1_000_000, stream.child(1))
    assert abs(est.mean - oracle) <= max(4 * est.stderr, 0.01 * oracle)


def test_degenerate_weight(stream, monkeypatch):
    monkeypatch.setattr(projest, "_cone_and_weight",
                        lambda spec, s, size: (np.zeros((size, spec.n)), np.zeros(size)))
    spec = ProjectedBodySpec(2.0, 3, Direction.diag(3))
    with pytest.raises(DegenerateWeight):
        estimate_ef(spec, lambda x: np.ones(len(x)), 100_000, stream)


def test_disk_report(stream):
    rep = variance_report(ProjectedBodySpec(2.0, 3, Direction.axis(3, 2)), 1_000_000, stream)
    assert rep.e_norm2.within(0.5)
    assert rep.var_norm2.within(1 / 12)
    assert abs(rep.lambda2 - 0.25) <= 4 * rep.lambda2_se
    assert rep.ratio.within(2 / 3)
    np.testing.assert_allclose(rep.cov, rep.cov.T, atol=1e-10)
    assert rep.lambda2 >= np.trace(rep.cov) / 3 > 0


@pytest.mark.parametrize("n", [5, 9])
def test_euclidean_ball_any_direction(stream, n):
    d = Direction.haar(stream.child(0), n)
    rep = variance_report(ProjectedBodySpec(2.0, n, d), 400_000, stream.child(1))
    e2, var, lam = _ball_closed_forms(n)
    assert rep.e_norm2.within(e2)
    assert rep.var_norm2.within(var)
    assert abs(rep.lambda2 - lam) <= 4 * rep.lambda2_se
    assert rep.ratio.within(var / (lam * e2), k=5)


def test_report_sample_floor(stream):
    with pytest.raises(ValueError):
        variance_report(ProjectedBodySpec(2.0, 3, Direction.diag(3)), 50_000, stream)


def test_four_terms(stream):
    spec = ProjectedBodySpec(2.0, 8, Direction.haar(stream.child(0), 8))
    rep = variance_report(spec, 200_000, stream.child(1))
    scale = theoretical_scale(spec)
    for t in rep.terms:
        assert math.isfinite(t.mean) and t.mean / scale <= 30
    assert rep.terms[1].mean / (scale * math.log1p(2.0)) <= 30
    sigma = math.sqrt(sum(t.stderr ** 2 for t in rep.terms) + rep.var_norm2.stderr ** 2)
    assert rep.terms_sum >= rep.var_norm2.mean - 4 * sigma
    again = projest.four_term_decomposition(spec, 200_000, stream.child(1))
    assert [t.mean for t in again] == [t.mean for t in rep.terms]


@pytest.mark.parametrize("p", [1.0, 4.0, 64.0])
def test_ratio_bounded(stream, p):
    rep = variance_report(ProjectedBodySpec(p, 16, Direction.haar(stream.child(0), 16)), 100_000, stream.child(1))
    assert 0 < rep.ratio.mean <= 30
    assert rep.ratio_over_log1p <= 30
