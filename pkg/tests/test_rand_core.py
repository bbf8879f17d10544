import math

import numpy as np
import pytest

from lpvariance import rand_core, specfun
from lpvariance.batching import mean_estimate, run_batches
from lpvariance.rand_core import RngStream, stream_id_for


def test_stream_replay_and_independence():
    a = RngStream(7, 3).generator.random(5)
    b = RngStream(7, 3).generator.random(5)
    c = RngStream(7, 4).generator.random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    s = RngStream(7, 3)
    s.generator.random(10)
    np.testing.assert_array_equal(s.fresh().generator.random(5), a)


def test_children_do_not_consume_parent():
    s = RngStream(1, 2)
    c0 = s.child(0).generator.random(3)
    np.testing.assert_array_equal(s.generator.random(5), RngStream(1, 2).generator.random(5))
    assert not np.array_equal(c0, s.child(1).generator.random(3))


def test_stream_id_is_stable():
    assert stream_id_for("ratio", 2.0, 8, 0) == stream_id_for("ratio", 2.0, 8, 0)
    assert stream_id_for("ratio", 2.0, 8, 0) != stream_id_for("ratio", 2.0, 8, 1)
    assert 0 <= stream_id_for("x") < 2 ** 64


def _mean(stream, n, fn):
    z, bs = run_batches(stream, n, lambda s, b: [fn(s, b)])
    return mean_estimate(z[:, 0], bs)


def test_gamma_tail_and_mean(stream):
    tail = _mean(stream.child(0), 1_000_000, lambda s, b: np.mean(rand_core.sample_gamma(s, 1.0, b) > 1))
    assert tail.within(math.exp(-1))
    for k, shape in enumerate((0.01, 0.3, 2.5)):
        m = _mean(stream.child(k + 1), 400_000, lambda s, b: rand_core.sample_gamma(s, shape, b).mean())
        assert m.within(shape)


def test_gamma_deterministic():
    a = rand_core.sample_gamma(RngStream(5, 9), 0.2, 100)
    b = rand_core.sample_gamma(RngStream(5, 9), 0.2, 100)
    np.testing.assert_array_equal(a, b)
    with pytest.raises(ValueError):
        rand_core.sample_gamma(RngStream(5, 9), 0.0, 3)


def test_gg_second_moment_and_symmetry(stream):
    m2 = _mean(stream.child(0), 500_000, lambda s, b: np.mean(rand_core.sample_gg(s, 2, b) ** 2))
    assert m2.within(0.5)
    m1 = _mean(stream.child(1), 500_000, lambda s, b: rand_core.sample_gg(s, 1.5, b).mean())
    assert m1.within(0.0)


@pytest.mark.parametrize("p", [1.0, 1.5, 3.0, 8.0])
def test_gg_fourth_moment(stream, p):
    m4 = _mean(stream, 500_000, lambda s, b: np.mean(rand_core.sample_gg(s, p, b) ** 4))
    assert m4.within(specfun.moment_g(p, 4))


def test_gg_scalar_and_shape():
    assert isinstance(rand_core.sample_gg(RngStream(1), 2.0), float)
    assert rand_core.sample_gg(RngStream(1), 2.0, (4, 3)).shape == (4, 3)


@pytest.mark.parametrize("p,n", [(1.0, 8), (3.0, 5)])
def test_gs_norm_moments(stream, p, n):
    for a in (1, 2):
        est = _mean(stream.child(a), 300_000, lambda s, b: np.mean(rand_core.sample_gs(s, p, n, b).s ** a))
        assert est.within(specfun.moment_S(p, n, a))


def test_gs_positive_and_exchangeable(stream):
    gs = rand_core.sample_gs(stream, 1.5, 4, 200_000)
    assert (gs.s > 0).all()
    np.testing.assert_allclose(gs.s, np.sum(np.abs(gs.g) ** 1.5, axis=1) ** (1 / 1.5), rtol=1e-12)
    a, b = gs.g[:, 0] ** 2, gs.g[:, 1] ** 2
    diff = a - b
    assert abs(diff.mean()) <= 4 * diff.std() / math.sqrt(diff.size)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 7.0, 200.0])
def test_cone_on_sphere(stream, p):
    y = rand_core.sample_cone(stream, p, 6, 2000).y
    norms = np.sum(np.abs(y) ** p, axis=1) ** (1 / p)
    np.testing.assert_allclose(norms, 1.0, atol=1e-12)


def test_cone_circle_and_independence(stream):
    est = _mean(stream.child(0), 400_000, lambda s, b: np.mean(rand_core.sample_cone(s, 2, 2, b).y[:, 0] ** 2))
    assert est.within(0.5)
    gs = rand_core.sample_gs(stream.child(1), 3.0, 16, 200_000)
    a = np.abs(gs.g).max(axis=1) / gs.s
    r = np.corrcoef(a, gs.s)[0, 1]
    assert abs(r) <= 4 / math.sqrt(a.size)


@pytest.mark.parametrize("p,n", [(1.0, 3), (1.5, 5), (4.0, 8)])
def test_ball_uniform_norm_moment(stream, p, n):
    x = rand_core.sample_ball_uniform(stream, p, n, 1000)
    assert (np.sum(np.abs(x) ** p, axis=1) <= 1 + 1e-12).all()
    est = _mean(stream.child(1), 300_000,
                lambda s, b: np.mean(np.sum(np.abs(rand_core.sample_ball_uniform(s, p, n, b)) ** p, axis=1)))
    assert est.within(n / (n + p))


def test_disk_second_moment(stream):
    est = _mean(stream, 400_000, lambda s, b: np.mean(np.sum(rand_core.sample_ball_uniform(s, 2, 2, b) ** 2, axis=1)))
    assert est.within(0.5)


def test_haar_direction(stream):
    v = rand_core.sample_haar_direction(stream, 5, 1000)
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0, rtol=1e-14)
    assert abs(v.mean()) < 0.05
