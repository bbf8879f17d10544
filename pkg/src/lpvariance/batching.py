"""Batch-means Monte Carlo plumbing shared by the estimators.

A run is split into ``n_batches`` batches; batch ``b`` draws from child stream
``b`` of the caller's stream, so results are bit-identical for any worker
count.  Standard errors of smooth functions of several means come from the
delta method on the joint covariance of the batch means.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .rand_core import RngStream

DEFAULT_BATCHES = 100
MIN_BATCHES = 30


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    stderr: float
    n_samples: int
    n_batches: int

    def zscore(self, target: float) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.mean == target else math.copysign(math.inf, self.mean - target)
        return (self.mean - target) / self.stderr

    def within(self, target: float, k: float = 4.0) -> bool:
        return abs(self.mean - target) <= k * self.stderr

    def __float__(self):
        return self.mean


def split_samples(n_samples: int, n_batches: int = DEFAULT_BATCHES) -> int:
    if n_batches < MIN_BATCHES:
        raise ValueError(f"need at least {MIN_BATCHES} batches for a standard error")
    batch_size = n_samples // n_batches
    if batch_size < 1:
        raise ValueError("fewer samples than batches")
    return batch_size


def run_batches(stream: RngStream, n_samples: int, batch_fn, n_batches: int = DEFAULT_BATCHES,
                workers: int = 1) -> tuple[np.ndarray, int]:
    """Evaluate ``batch_fn(child_stream, batch_size)`` for every batch.

    ``batch_fn`` returns a 1-D vector of per-batch means.  Rows of the result
    are ordered by batch index regardless of completion order.  Returns the
    ``(n_batches, k)`` matrix and the batch size.
    """
    batch_size = split_samples(n_samples, n_batches)
    children = stream.children(n_batches)
    if workers <= 1:
        rows = [batch_fn(c, batch_size) for c in children]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda c: batch_fn(c, batch_size), children))
    return np.array([np.atleast_1d(np.asarray(r, dtype=float)) for r in rows]), batch_size


def mean_estimate(col: np.ndarray, batch_size: int) -> MomentEstimate:
    col = np.asarray(col, dtype=float)
    b = col.size
    return MomentEstimate(float(col.mean()), float(col.std(ddof=1) / math.sqrt(b)),
                          batch_size * b, b)


def delta_method(batch_means: np.ndarray, fn, batch_size: int = 1) -> MomentEstimate:
    """Value and delta-method standard error of ``fn(mean vector)``.

    The gradient is taken by central differences with steps scaled to each
    column; the covariance of the grand mean is the batch covariance over ``B``.
    """
    z = np.atleast_2d(np.asarray(batch_means, dtype=float))
    b, k = z.shape
    m = z.mean(axis=0)
    value = float(fn(m))
    sd = z.std(axis=0, ddof=1)
    grad = np.zeros(k)
    for j in range(k):
        h = 1e-6 * max(abs(m[j]), sd[j], 1e-300)
        up, dn = m.copy(), m.copy()
        up[j] += h
        dn[j] -= h
        grad[j] = (fn(up) - fn(dn)) / (2.0 * h)
    cov = np.atleast_2d(np.cov(z, rowvar=False)) / b
    var = float(grad @ cov @ grad)
    return MomentEstimate(value, math.sqrt(max(var, 0.0)), batch_size * b, b)


def ratio_estimate(num: np.ndarray, den: np.ndarray, batch_size: int) -> MomentEstimate:
    """Ratio of means ``sum(num) / sum(den)`` with the linearized standard error."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    b = num.size
    r = float(num.sum() / den.sum())
    resid = num - r * den
    var = float(resid.var(ddof=1)) / b / float(den.mean()) ** 2
    return MomentEstimate(r, math.sqrt(var), batch_size * b, b)


def combined_sigma(*stderrs: float) -> float:
    return math.sqrt(sum(s * s for s in stderrs))
