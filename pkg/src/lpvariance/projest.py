"""Expectations over the uniform measure on a hyperplane projection of ``B_p^n``.

If ``X`` is uniform on ``P_H(B_p^n)`` with ``H = theta^perp`` then

    E f(X) = E[ f(P_H(G/S)) psi_theta(G) ] / E[ psi_theta(G) ],

so every quantity here is a ratio of Monte Carlo means over cone-measure
samples weighted by ``psi_theta``.  A single sample pool feeds ``E|X|^2``,
``E|X|^4``, the covariance and the four-term bound (common random numbers).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .batching import (DEFAULT_BATCHES, MomentEstimate, delta_method, ratio_estimate,
                       run_batches)
from .rand_core import RngStream, sample_gs
from .specfun import PExponent, as_exponent
from .weights import Direction, signed_power


class DegenerateWeight(RuntimeError):
    """The estimated normalizer ``E psi`` is statistically indistinguishable from 0."""


@dataclass(frozen=True)
class ProjectedBodySpec:
    p: PExponent
    n: int
    direction: Direction

    def __post_init__(self):
        object.__setattr__(self, "p", as_exponent(self.p))
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.direction.n != self.n:
            raise ValueError("direction dimension does not match n")

    @property
    def theta(self):
        return self.direction.theta


def hyperplane_basis(theta) -> np.ndarray:
    """Orthonormal basis of ``theta^perp`` as the rows of an ``(n-1, n)`` matrix.

    Modified Gram-Schmidt applied to ``theta, e_1, ..., e_n``; deterministic, so
    the quadrature oracle and the estimators share one parametrization of H.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.size
    basis = [theta / np.linalg.norm(theta)]
    for i in range(n):
        v = np.zeros(n)
        v[i] = 1.0
        for _ in range(2):
            for b in basis:
                v = v - (v @ b) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) == n:
            break
    return np.array(basis[1:])


def largest_eigenvalue(sym) -> float:
    a = np.asarray(sym, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.abs(a).max())) if a.size else 1.0
    if np.abs(a - a.T).max(initial=0.0) > 1e-8 * scale:
        raise ValueError("matrix is not symmetric to 1e-8")
    return float(np.linalg.eigvalsh(0.5 * (a + a.T))[-1])


def theoretical_scale(spec: ProjectedBodySpec) -> float:
    """``n^(1 - 4/p)``, the order of ``lambda_X^2 E|X|^2``."""
    return float(spec.n) ** (1.0 - 4.0 / spec.p.p)


def _cone_and_weight(spec, stream, size):
    gs = sample_gs(stream, spec.p, spec.n, size)
    w = np.abs(signed_power(gs.g, spec.p) @ spec.theta)
    return gs.g / gs.s[:, None], w


def _check_weight(den_col, bs):
    est = MomentEstimate(float(den_col.mean()), float(den_col.std(ddof=1) / math.sqrt(den_col.size)),
                         bs * den_col.size, den_col.size)
    if not est.mean > 6.0 * est.stderr:
        raise DegenerateWeight(f"E psi = {est.mean:.3g} +- {est.stderr:.3g}")


def estimate_ef(spec: ProjectedBodySpec, f, n_samples: int, stream: RngStream,
                workers: int = 1, n_batches: int = DEFAULT_BATCHES) -> MomentEstimate:
    """``E f(X)`` for ``X`` uniform on ``P_H(B_p^n)``.

    ``f`` maps an ``(m, n)`` array of points of ``H`` (ambient coordinates) to
    ``m`` values.
    """
    theta = spec.theta

    def batch(s, bs):
        y, w = _cone_and_weight(spec, s, bs)
        x = y - np.outer(y @ theta, theta)
        fx = np.broadcast_to(np.asarray(f(x), dtype=float), w.shape)
        return [np.sum(fx * w) / bs, np.sum(w) / bs]

    z, bs = run_batches(stream, n_samples, batch, n_batches, workers)
    _check_weight(z[:, 1], bs)
    return ratio_estimate(z[:, 0], z[:, 1], bs)


@dataclass
class _Pool:
    z: np.ndarray          # (B, k) scalar batch means
    cov_b: np.ndarray      # (B, n-1, n-1) batch means of psi * x x^T in H coordinates
    batch_size: int
    n: int
    basis: np.ndarray

    # column layout of z
    W, X2, X4, Y2, Y4, T2, T4 = range(7)

    def col(self, j):
        return self.z[:, j]

    @property
    def first_coord(self):
        return 7


def _pool(spec: ProjectedBodySpec, n_samples: int, stream: RngStream, workers: int,
          n_batches: int = DEFAULT_BATCHES) -> _Pool:
    theta = spec.theta
    basis = hyperplane_basis(theta)
    n = spec.n

    def batch(s, bs):
        y, w = _cone_and_weight(spec, s, bs)
        t = y @ theta
        y2c = y * y
        ny2 = y2c.sum(axis=1)
        x2 = ny2 - t * t
        zh = y @ basis.T
        cov = (zh * w[:, None]).T @ zh / bs
        scal = np.concatenate([
            [w.mean(), (w * x2).mean(), (w * x2 * x2).mean(), (w * ny2).mean(),
             (w * ny2 * ny2).mean(), (w * t * t).mean(), (w * t ** 4).mean()],
            (w[:, None] * y2c).mean(axis=0),
            (w[:, None] * y2c * y2c).mean(axis=0),
        ])
        return np.concatenate([scal, cov.ravel()])

    raw, bs = run_batches(stream, n_samples, batch, n_batches, workers)
    k = 7 + 2 * n
    pool = _Pool(raw[:, :k], raw[:, k:].reshape(-1, n - 1, n - 1), bs, n, basis)
    _check_weight(pool.col(_Pool.W), bs)
    return pool


def _four_terms(pool: _Pool):
    n = pool.n
    c0 = pool.first_coord
    W, Y2, Y4, T2, T4 = _Pool.W, _Pool.Y2, _Pool.Y4, _Pool.T2, _Pool.T4

    def t1(m):
        e2 = m[c0:c0 + n] / m[W]
        e4 = m[c0 + n:c0 + 2 * n] / m[W]
        return float(np.sum(e4 - e2 * e2))

    def t2(m):
        var_y = m[Y4] / m[W] - (m[Y2] / m[W]) ** 2
        return var_y - t1(m)

    def t3(m):
        return m[T4] / m[W]

    def t4(m):
        return 2.0 * (m[Y2] / m[W]) * (m[T2] / m[W])

    return [delta_method(pool.z, fn, pool.batch_size) for fn in (t1, t2, t3, t4)]


@dataclass
class VarianceReport:
    spec: ProjectedBodySpec
    e_norm2: MomentEstimate
    e_norm4: MomentEstimate
    var_norm2: MomentEstimate
    cov: np.ndarray
    cov_h: np.ndarray
    lambda2: float
    ratio: MomentEstimate
    terms: list = field(default_factory=list)
    lambda2_se: float = math.nan

    @property
    def scale(self) -> float:
        return theoretical_scale(self.spec)

    @property
    def ratio_over_log1p(self) -> float:
        return self.ratio.mean / math.log1p(self.spec.p.p)

    @property
    def terms_sum(self) -> float:
        return float(sum(t.mean for t in self.terms))


def variance_report(spec: ProjectedBodySpec, n_samples: int, stream: RngStream,
                    workers: int = 1) -> VarianceReport:
    """``E|X|^2``, ``Var|X|^2``, the covariance, ``lambda_X^2`` and ``R = Var / (lambda^2 E)``."""
    if n_samples < 100_000:
        raise ValueError("variance_report needs at least 1e5 samples")
    pool = _pool(spec, n_samples, stream, workers)
    W, X2, X4 = _Pool.W, _Pool.X2, _Pool.X4
    zc = pool.col
    bs = pool.batch_size
    e2 = ratio_estimate(zc(X2), zc(W), bs)
    e4 = ratio_estimate(zc(X4), zc(W), bs)
    var = delta_method(pool.z[:, [W, X2, X4]], lambda m: m[2] / m[0] - (m[1] / m[0]) ** 2, bs)

    cov_h = pool.cov_b.mean(axis=0) / zc(W).mean()
    cov_h = 0.5 * (cov_h + cov_h.T)
    evals, evecs = np.linalg.eigh(cov_h)
    lam = float(evals[-1])
    v = evecs[:, -1]
    vv = np.einsum("i,bij,j->b", v, pool.cov_b, v)
    cols = np.column_stack([zc(W), zc(X2), zc(X4), vv])

    def ratio_fn(m):
        ex2 = m[1] / m[0]
        return (m[2] / m[0] - ex2 * ex2) / ((m[3] / m[0]) * ex2)

    ratio = delta_method(cols, ratio_fn, bs)
    cov = pool.basis.T @ cov_h @ pool.basis
    # |lambda_hat - lambda| <= ||dA||_F (Weyl), which stays valid when the top
    # eigenvalue is degenerate, unlike the first-order error v^T dA v.
    resid = (pool.cov_b - cov_h[None] * zc(W)[:, None, None]) / zc(W).mean()
    lam_se = float(np.sqrt(np.sum(resid.var(axis=0, ddof=1)) / resid.shape[0]))
    return VarianceReport(spec, e2, e4, var, cov, cov_h, lam, ratio, _four_terms(pool), lam_se)


def four_term_decomposition(spec: ProjectedBodySpec, n_samples: int, stream: RngStream,
                            workers: int = 1) -> list[MomentEstimate]:
    """The diagonal, cross, ``<y, theta>^4`` and mixed-product summands bounding ``Var|X|^2``."""
    if n_samples < 100_000:
        raise ValueError("four_term_decomposition needs at least 1e5 samples")
    return _four_terms(_pool(spec, n_samples, stream, workers))
