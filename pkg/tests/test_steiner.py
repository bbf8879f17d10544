import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lpvariance import steiner
from lpvariance.oracle_quad import quad_moments_ball
from lpvariance.rand_core import RngStream, sample_ball_uniform
from lpvariance.steiner import chord, chords, isotropic_spec, membership_projection
from lpvariance.weights import Direction


def test_chord_examples():
    c = chord(2.0, 3, Direction.axis(3, 2), [0, 0, 0])
    assert (c.a, c.b) == pytest.approx((-1.0, 1.0), abs=1e-12)
    c = chord(1.0, 3, Direction.axis(3, 2), [0.5, 0, 0])
    assert (c.a, c.b) == pytest.approx((-0.5, 0.5), abs=1e-12)
    assert c.half_length == pytest.approx(0.5)
    # outside the circumscribed ball of radius n^(1/2 - 1/p)
    assert chord(4.0, 3, Direction.axis(3, 2), [1.4, 0.0, 0]) is None


def test_chord_requires_hyperplane_point():
    with pytest.raises(ValueError):
        chord(2.0, 3, Direction.axis(3, 2), [0, 0, 0.1])


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([1.0, 1.5, 2.0, 3.0, 9.0]), st.integers(0, 10_000))
def test_chord_certificate(p, seed):
    n = 4
    s = RngStream(seed, 11)
    d = Direction.haar(s.child(0), n)
    x = sample_ball_uniform(s.child(1), p, n, 20)
    y = x - np.outer(x @ d.theta, d.theta)
    a, b = chords(p, d.theta, y)
    assert not np.isnan(a).any()
    for lo, hi, yy in zip(a, b, y):
        assert lo <= hi
        for t in (lo, hi):
            assert steiner.lp_norm(yy + t * d.theta, p) == pytest.approx(1.0, abs=1e-9)
        assert steiner.lp_norm(yy + 0.5 * (lo + hi) * d.theta, p) <= 1 + 1e-12
        assert steiner.lp_norm(yy + (hi + 1e-6) * d.theta, p) > 1


def test_membership():
    d = Direction.of([1, 1, 0])
    assert membership_projection(3.0, 3, d, [0, 0, 0])
    e = Direction.axis(3, 0)
    for r in (0.5, 0.999, 1.001, 1.5):
        assert membership_projection(2.0, 3, e, [0, r / math.sqrt(2), r / math.sqrt(2)]) == (r <= 1)
    y = np.array([0.3, -0.3, 0.5])
    if chord(1.5, 3, d, y) is not None:
        assert membership_projection(1.5, 3, d, y)


def test_isotropic_constants():
    assert isotropic_spec(1.0, 2).lk2 == pytest.approx(1 / 12, rel=1e-10)
    disk = isotropic_spec(2.0, 2)
    assert disk.lk2 == pytest.approx(1 / (4 * math.pi), rel=1e-10)
    for p in (1.5, 3.0):
        spec = isotropic_spec(p, 2)
        e1 = quad_moments_ball(p, 2, [(2, 0)]).value * spec.scale ** 2
        e2 = quad_moments_ball(p, 2, [(0, 2)]).value * spec.scale ** 2
        assert spec.lk2 == pytest.approx(e1, rel=1e-3)
        assert e1 == pytest.approx(e2, rel=1e-6)


def test_steiner_sample_count(stream):
    y = steiner.sample_steiner(stream, 1.5, 3, Direction.haar(stream.child(0), 3), 1234)
    assert y.shape == (1234, 3)


def test_axis_direction_identity(stream):
    res = steiner.steiner_variance_compare(1.5, 3, Direction.axis(3, 2), 400_000, stream)
    assert abs(res["diff"].mean) <= 4 * res["diff"].stderr
    for key in ("e_theta4_gap", "e_theta2_gap"):
        assert abs(res[key].mean) <= 4 * res[key].stderr


def test_coordinate_moments(stream):
    res = steiner.coordinate_moment_compare(1.5, 3, 2, 400_000, stream)
    for g in res["second_gap"]:
        assert abs(g.mean) <= 4 * g.stderr
    for g in res["mixed_gap"]:
        assert g.mean >= -4 * g.stderr


def test_haar_comparison(stream):
    d = Direction.haar(stream.child(0), 3)
    res = steiner.steiner_variance_compare(1.5, 3, d, 400_000, stream.child(1))
    diff = res["diff"]
    assert abs(diff.mean) <= 10 * res["bound"] + 4 * diff.stderr
    assert res["e_theta4_gap"].mean >= -4 * res["e_theta4_gap"].stderr
    assert res["e_theta2_gap"].mean >= -4 * res["e_theta2_gap"].stderr
    rx, ry = res["ratio_x"].mean, res["ratio_y"].mean
    assert ry <= 2 * (rx + 10) and rx <= ry + 10


def test_projection_decomposition(stream):
    d = Direction.haar(stream.child(0), 8)
    res = steiner.projection_decomposition_check(3.0, 8, d, 300_000, stream.child(1))
    assert res["passed"]
    assert res["var_perp"].mean > 0


def test_projection_decomposition_ball(stream):
    n = 5
    res = steiner.projection_decomposition_check(2.0, n, Direction.axis(n, 0), 400_000, stream)
    # |X|^2 has the Beta(n/2, 1) law; the slab coordinate squared has mean 1/(n+2)
    var_norm = n / (n + 4) - (n / (n + 2)) ** 2
    e_t2, e_t4 = 1 / (n + 2), 3 / ((n + 2) * (n + 4))
    assert res["var_x"].within(var_norm)
    assert res["var_perp"].within(e_t4 - e_t2 ** 2)
