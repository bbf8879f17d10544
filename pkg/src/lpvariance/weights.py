"""The projection weight psi_theta, its companion phi_theta, and their moments.

For ``g`` a vector of i.i.d. generalized Gaussians,

    psi_theta = |sum_i |g_i|^(p-1) sign(g_i) theta_i|
    phi_theta = (sum_i |g_i|^(2p-2) theta_i^2)^(1/2)

``E psi_theta`` is the normalizer of the weighted representation of the
uniform measure on the projection of ``B_p^n`` onto ``theta^perp``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .batching import (DEFAULT_BATCHES, MomentEstimate, delta_method, mean_estimate,
                       ratio_estimate, run_batches)
from .rand_core import RngStream, sample_gg, sample_haar_direction
from .specfun import as_exponent

MIN_SAMPLES = 30_000


@dataclass(frozen=True)
class Direction:
    """Unit vector ``theta``; the hyperplane of interest is ``theta^perp``."""

    theta: np.ndarray
    norm1: float = field(init=False)

    def __post_init__(self):
        t = np.array(self.theta, dtype=float).reshape(-1)
        if abs(np.linalg.norm(t) - 1.0) > 1e-12:
            raise ValueError("direction must have unit Euclidean norm (use Direction.of)")
        t.setflags(write=False)
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "norm1", float(np.abs(t).sum()))

    @classmethod
    def of(cls, v) -> "Direction":
        v = np.asarray(v, dtype=float).reshape(-1)
        nrm = np.linalg.norm(v)
        if nrm == 0 or not np.isfinite(nrm):
            raise ValueError("cannot normalize a zero or non-finite vector")
        t = v / nrm
        # one more pass so the norm is 1 to rounding
        return cls(t / np.linalg.norm(t))

    @classmethod
    def diag(cls, n: int) -> "Direction":
        return cls.of(np.ones(n))

    @classmethod
    def axis(cls, n: int, i: int = 0) -> "Direction":
        e = np.zeros(n)
        e[i] = 1.0
        return cls(e)

    @classmethod
    def haar(cls, stream: RngStream, n: int) -> "Direction":
        return cls.of(sample_haar_direction(stream, n))

    @property
    def n(self) -> int:
        return self.theta.size


def signed_power(g, p) -> np.ndarray:
    """``|g|^(p-1) sign(g)`` elementwise; ``sign(0) = 0`` and tiny values flush to 0."""
    p = as_exponent(p).p
    g = np.asarray(g, dtype=float)
    if p == 1.0:
        return np.sign(g)
    with np.errstate(divide="ignore", under="ignore"):
        return np.sign(g) * np.exp((p - 1.0) * np.log(np.abs(g)))


def _check_dims(g, direction: Direction):
    if np.shape(g)[-1] != direction.n:
        raise ValueError(f"dimension mismatch: g has {np.shape(g)[-1]} coordinates, "
                         f"theta has {direction.n}")


def psi(g, p, direction: Direction):
    _check_dims(g, direction)
    return np.abs(signed_power(g, p) @ direction.theta)


def phi(g, p, direction: Direction):
    _check_dims(g, direction)
    a = signed_power(g, p)
    return np.sqrt((a * a) @ (direction.theta ** 2))


def _require_samples(n_samples):
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n_samples}")


def estimate_epsi(p, n: int, direction: Direction, moment: int, n_samples: int,
                  stream: RngStream, workers: int = 1,
                  n_batches: int = DEFAULT_BATCHES) -> MomentEstimate:
    """Batched Monte Carlo estimate of ``E psi_theta`` (moment 1) or ``E psi_theta^2``."""
    if moment not in (1, 2):
        raise ValueError("moment must be 1 or 2")
    _require_samples(n_samples)
    pe = as_exponent(p)

    def batch(s, bs):
        v = psi(sample_gg(s, pe, (bs, n)), pe, direction)
        return [np.mean(v ** moment)]

    z, bs = run_batches(stream, n_samples, batch, n_batches, workers)
    return mean_estimate(z[:, 0], bs)


def estimate_psi_phi(p, n: int, direction: Direction, n_samples: int, stream: RngStream,
                     workers: int = 1, n_batches: int = DEFAULT_BATCHES):
    """``E psi``, ``E phi`` and ``E psi / E phi`` from one sample pool."""
    _require_samples(n_samples)
    pe = as_exponent(p)

    def batch(s, bs):
        g = sample_gg(s, pe, (bs, n))
        return [psi(g, pe, direction).mean(), phi(g, pe, direction).mean()]

    z, bs = run_batches(stream, n_samples, batch, n_batches, workers)
    return mean_estimate(z[:, 0], bs), mean_estimate(z[:, 1], bs), ratio_estimate(z[:, 0], z[:, 1], bs)


def epsi_scaling_check(p, n: int, n_samples: int, stream: RngStream, workers: int = 1) -> dict:
    """Normalized ``E psi_theta0`` on the diagonal direction.

    Returns ``sqrt(p) E psi`` when ``p <= n`` and ``(p / sqrt(n)) E psi`` when
    ``p > n``; both are bounded above and below by absolute constants.
    """
    pv = as_exponent(p).p
    est = estimate_epsi(pv, n, Direction.diag(n), 1, n_samples, stream, workers)
    factor = math.sqrt(pv) if pv <= n else pv / math.sqrt(n)
    return {
        "p": pv, "n": n, "regime": "p<=n" if pv <= n else "p>n",
        "e_psi": est.mean, "e_psi_se": est.stderr,
        "normalized": factor * est.mean, "normalized_se": factor * est.stderr,
    }


def remark_ratio(p, direction: Direction, n_samples: int, stream: RngStream,
                 workers: int = 1) -> MomentEstimate:
    """``p E psi_theta / ||theta||_1``, which tends to 1 as ``p`` grows."""
    pv = as_exponent(p).p
    est = estimate_epsi(pv, direction.n, direction, 1, n_samples, stream, workers)
    f = pv / direction.norm1
    return MomentEstimate(f * est.mean, f * est.stderr, est.n_samples, est.n_batches)


def subset_psi_ratio(p, n: int, direction: Direction, index_set, n_samples: int,
                     stream: RngStream, workers: int = 1) -> MomentEstimate:
    """``E|sum_{i in I} |g_i|^(p-1) sign(g_i) theta_i| / E psi_theta``; at most 1."""
    idx = sorted(set(int(i) for i in index_set))
    if any(i < 0 or i >= n for i in idx):
        raise ValueError("index set out of range")
    if not idx:
        return MomentEstimate(0.0, 0.0, 0, 0)
    _require_samples(n_samples)
    pe = as_exponent(p)
    full = len(idx) == n
    theta_sub = direction.theta[idx]

    def batch(s, bs):
        a = signed_power(sample_gg(s, pe, (bs, n)), pe)
        total = np.abs(a @ direction.theta)
        part = total if full else np.abs(a[:, idx] @ theta_sub)
        return [part.mean(), total.mean()]

    z, bs = run_batches(stream, n_samples, batch, DEFAULT_BATCHES, workers)
    if full:
        return MomentEstimate(1.0, 0.0, bs * z.shape[0], z.shape[0])
    return ratio_estimate(z[:, 0], z[:, 1], bs)


def symmetric_sum_moment(p, n: int, alpha: float, n_samples: int, stream: RngStream,
                         root: bool = True, workers: int = 1) -> MomentEstimate:
    """``(E|sum_i (g_i^2 - gbar_i^2)|^alpha)^(1/alpha)`` (or the raw moment if ``root=False``).

    ``alpha`` must be one of 2, 4, 8 and satisfy ``alpha <= e^p``.
    """
    pe = as_exponent(p)
    if alpha not in (2, 4, 8):
        raise ValueError("alpha must be 2, 4 or 8")
    if alpha > math.exp(pe.p):
        raise ValueError(f"alpha={alpha} exceeds e^p={math.exp(pe.p):.4g}")
    _require_samples(n_samples)

    def batch(s, bs):
        g = sample_gg(s, pe, (bs, 2, n))
        t = (g[:, 0] ** 2 - g[:, 1] ** 2).sum(axis=1)
        return [np.mean(np.abs(t) ** alpha)]

    z, bs = run_batches(stream, n_samples, batch, DEFAULT_BATCHES, workers)
    if not root:
        return mean_estimate(z[:, 0], bs)
    return delta_method(z, lambda m: m[0] ** (1.0 / alpha), bs)


def symmetric_sum_second_moment(p, n: int) -> float:
    """Closed form ``E(sum_i (g_i^2 - gbar_i^2))^2 = 2 n Var(g^2)``."""
    return 2.0 * n * (specfun.moment_g(p, 4) - specfun.moment_g(p, 2) ** 2)


def haar_direction_scan(p, n: int, n_dirs: int, n_samples: int, stream: RngStream,
                        threshold: float = 0.05, workers: int = 1) -> dict:
    """Estimate ``E psi_theta`` for ``n_dirs`` Haar directions against ``threshold * E psi_theta0``."""
    if n_dirs < 50:
        raise ValueError("n_dirs must be >= 50")
    ref = estimate_epsi(p, n, Direction.diag(n), 1, n_samples, stream.child(0), workers)
    values = []
    for k in range(n_dirs):
        d = Direction.haar(stream.child(1).child(k), n)
        values.append(estimate_epsi(p, n, d, 1, n_samples, stream.child(2).child(k), workers).mean)
    values = np.array(values)
    passed = values >= threshold * ref.mean
    return {"e_psi_theta0": ref.mean, "e_psi": values, "fraction": float(passed.mean())}


def haar_direction_fraction(p, n: int, n_dirs: int, n_samples: int, stream: RngStream,
                            threshold: float = 0.05, workers: int = 1) -> float:
    return haar_direction_scan(p, n, n_dirs, n_samples, stream, threshold, workers)["fraction"]
