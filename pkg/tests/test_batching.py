import math

import numpy as np
import pytest

from lpvariance import batching
from lpvariance.batching import MomentEstimate, delta_method, mean_estimate, ratio_estimate, run_batches
from lpvariance.rand_core import RngStream


def test_split_samples():
    assert batching.split_samples(1000, 100) == 10
    with pytest.raises(ValueError):
        batching.split_samples(1000, 10)
    with pytest.raises(ValueError):
        batching.split_samples(50, 100)


def _batch(s, bs):
    x = s.generator.random(bs)
    return [x.mean(), (x * x).mean()]


def test_threads_do_not_change_results():
    a, _ = run_batches(RngStream(3, 1), 10_000, _batch, workers=1)
    b, _ = run_batches(RngStream(3, 1), 10_000, _batch, workers=4)
    np.testing.assert_array_equal(a, b)


def test_mean_and_delta_method_on_uniform():
    z, bs = run_batches(RngStream(3, 2), 200_000, _batch)
    m = mean_estimate(z[:, 0], bs)
    assert m.n_samples == 200_000 and m.n_batches == 100
    assert m.within(0.5)
    # true sd of a uniform mean is sqrt(1/12 / N)
    assert m.stderr == pytest.approx(math.sqrt(1 / 12 / 200_000), rel=0.25)
    var = delta_method(z, lambda v: v[1] - v[0] ** 2, bs)
    assert var.within(1 / 12)


def test_ratio_of_identical_columns_is_exact():
    col = np.linspace(1, 2, 40)
    r = ratio_estimate(col, col, 10)
    assert r.mean == 1.0 and r.stderr == 0.0


def test_delta_method_linear_matches_direct():
    rng = np.random.default_rng(0)
    z = rng.normal(size=(50, 2))
    est = delta_method(z, lambda v: 2 * v[0] - v[1])
    direct = (2 * z[:, 0] - z[:, 1])
    assert est.stderr == pytest.approx(direct.std(ddof=1) / math.sqrt(50), rel=1e-6)


def test_zscore():
    e = MomentEstimate(1.0, 0.5, 10, 10)
    assert e.zscore(0.0) == 2.0
    assert MomentEstimate(1.0, 0.0, 1, 1).zscore(1.0) == 0.0
    assert batching.combined_sigma(3.0, 4.0) == 5.0
