"""Fibers of ``B_p^n`` along a direction, Steiner symmetrization, and the
variance comparisons between a body, its projections and its symmetrals.

All fiber computations are vectorized over rows of ``y``.  The fiber map
``t -> ||y + t theta||_p`` is convex and coercive, so its minimum is found by
golden-section search and its level-1 crossings by monotone Newton iteration
started outside the fiber (convexity keeps every iterate outside).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .batching import DEFAULT_BATCHES, MomentEstimate, delta_method, run_batches
from .projest import hyperplane_basis
from .rand_core import RngStream, sample_ball_uniform
from .specfun import PExponent, as_exponent
from .weights import Direction

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def lp_norm(v, p: float, axis=-1):
    """Overflow-safe l_p norm along ``axis``."""
    a = np.abs(np.asarray(v, dtype=float))
    m = a.max(axis=axis, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    with np.errstate(under="ignore"):
        s = ((a / safe) ** p).sum(axis=axis, keepdims=True)
    return np.squeeze(m * s ** (1.0 / p), axis=axis)


def _norm_and_slope(y, theta, t, p):
    # value and t-derivative of ||y + t theta||_p
    v = y + t[:, None] * theta
    a = np.abs(v)
    m = a.max(axis=1, keepdims=True)
    m = np.where(m > 0, m, 1.0)
    r = a / m
    with np.errstate(under="ignore", divide="ignore", invalid="ignore"):
        rp1 = r ** (p - 1.0) if p != 1.0 else np.ones_like(r)
        s = (rp1 * r).sum(axis=1)
        slope = (np.sign(v) * rp1 * theta).sum(axis=1) / s ** ((p - 1.0) / p)
    return m[:, 0] * s ** (1.0 / p), slope


def fiber_minimum(p, theta, y, tol: float = 1e-12):
    """Golden-section minimum of ``t -> ||y + t theta||_p`` per row of ``y``.

    Returns ``(t_min, value)``.
    """
    pv = as_exponent(p).p
    theta = np.asarray(theta, dtype=float)
    y = np.atleast_2d(np.asarray(y, dtype=float))
    span = 2.0 * lp_norm(y, pv) / lp_norm(theta, pv) + 1e-300
    lo, hi = -span, span.copy()

    def f(t):
        return lp_norm(y + t[:, None] * theta, pv)

    width = float(span.max()) * 2.0
    iters = max(1, int(math.ceil(math.log(max(width, tol) / tol) / -math.log(_INV_PHI))))
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc <= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = hi - _INV_PHI * (hi - lo)
        new_d = lo + _INV_PHI * (hi - lo)
        # reuse the surviving interior point
        c, d = np.where(left, new_c, d), np.where(left, c, new_d)
        fnew = f(np.where(left, c, d))
        fc, fd = np.where(left, fnew, fd), np.where(left, fc, fnew)
    t = 0.5 * (lo + hi)
    return t, f(t)


def projection_gauge(p, theta, y):
    """``min_t ||y + t theta||_p``: the norm on ``theta^perp`` whose unit ball is ``P_H(B_p^n)``."""
    return fiber_minimum(p, theta, y)[1]


def _newton_crossing(y, theta, p, t_start, max_iter=200, tol=1e-14):
    t = t_start.copy()
    for _ in range(max_iter):
        val, slope = _norm_and_slope(y, theta, t, p)
        step = np.where(slope != 0, (val - 1.0) / np.where(slope != 0, slope, 1.0), 0.0)
        step = np.where(val > 1.0, step, 0.0)
        t = t - step
        if np.all(np.abs(step) <= tol * (1.0 + np.abs(t))):
            break
    return t


def fiber_endpoints(p, theta, y, t_inside):
    """Endpoints ``(a, b)`` of ``{t : ||y + t theta||_p <= 1}`` given an interior ``t``."""
    pv = as_exponent(p).p
    theta = np.asarray(theta, dtype=float)
    y = np.atleast_2d(np.asarray(y, dtype=float))
    reach = (1.0 + lp_norm(y, pv)) / lp_norm(theta, pv)
    t_inside = np.asarray(t_inside, dtype=float)
    b = _newton_crossing(y, theta, pv, np.maximum(reach, t_inside) * (1 + 1e-9) + 1e-9)
    a = _newton_crossing(y, theta, pv, np.minimum(-reach, t_inside) * (1 + 1e-9) - 1e-9)
    return a, b


@dataclass(frozen=True)
class Chord:
    a: float
    b: float

    @property
    def half_length(self) -> float:
        return 0.5 * (self.b - self.a)


def chords(p, theta, y):
    """Vectorized chords; rows with empty fibers get ``nan`` endpoints."""
    t_min, vmin = fiber_minimum(p, theta, y)
    a, b = fiber_endpoints(p, theta, y, t_min)
    empty = vmin > 1.0
    return np.where(empty, np.nan, a), np.where(empty, np.nan, b)


def _check_in_hyperplane(theta, y):
    if np.any(np.abs(np.atleast_2d(y) @ theta) > 1e-10):
        raise ValueError("y must be orthogonal to theta")


def chord(p, n: int, direction: Direction, y) -> Chord | None:
    """The fiber of ``B_p^n`` over ``y`` in ``theta^perp``, or ``None`` if it is empty."""
    y = np.asarray(y, dtype=float).reshape(1, n)
    _check_in_hyperplane(direction.theta, y)
    a, b = chords(p, direction.theta, y)
    if np.isnan(a[0]):
        return None
    return Chord(float(a[0]), float(b[0]))


def membership_projection(p, n: int, direction: Direction, y) -> bool:
    y = np.asarray(y, dtype=float).reshape(1, n)
    _check_in_hyperplane(direction.theta, y)
    return bool(projection_gauge(p, direction.theta, y)[0] <= 1.0 + 1e-10)


@dataclass(frozen=True)
class IsotropicBodySpec:
    """``B_p^n`` rescaled to volume 1 and its axis second moment ``L_K^2``."""

    p: PExponent
    n: int
    scale: float
    lk2: float


def isotropic_spec(p, n: int) -> IsotropicBodySpec:
    pe = as_exponent(p)
    scale = math.exp(-specfun.log_ball_volume(pe, n) / n)
    lk2 = scale ** 2 * (n / (n + 2.0)) * specfun.moment_g(pe, 2) / specfun.moment_S(pe, n, 2)
    return IsotropicBodySpec(pe, n, scale, lk2)


def steiner_pairs(stream: RngStream, p, n: int, direction: Direction, size: int):
    """``X`` uniform on the volume-1 body and ``Y`` uniform on its Steiner symmetral.

    ``Y`` keeps the projection of ``X`` and redraws the coordinate along theta
    uniformly on the centered fiber of the same length.
    """
    body = isotropic_spec(p, n)
    theta = direction.theta
    x = sample_ball_uniform(stream, body.p, n, size)
    t_x = x @ theta
    y = x - t_x[:, None] * theta
    a, b = fiber_endpoints(body.p, theta, y, t_x)
    u = 2.0 * stream.generator.random(size) - 1.0
    ys = y + (0.5 * u * (b - a))[:, None] * theta
    return body.scale * x, body.scale * ys


def sample_steiner(stream: RngStream, p, n: int, direction: Direction, size: int):
    return steiner_pairs(stream, p, n, direction, size)[1]


def _var_fn(i2, i4):
    return lambda m: m[i4] - m[i2] ** 2


def steiner_variance_compare(p, n: int, direction: Direction, n_samples: int,
                             stream: RngStream, workers: int = 1) -> dict:
    """``Var|Y|^2`` against ``Var|X|^2`` on one pool of (X, Y) pairs.

    Also returns the variance-conjecture ratios ``R = Var|.|^2 / (lambda^2 E|.|^2)``
    of both bodies and the moments along theta used by the monotonicity checks.
    """
    body = isotropic_spec(p, n)
    theta = direction.theta

    def batch(s, bs):
        x, y = steiner_pairs(s, p, n, direction, bs)
        nx, ny = (x * x).sum(1), (y * y).sum(1)
        tx, ty = x @ theta, y @ theta
        scal = [nx.mean(), (nx * nx).mean(), ny.mean(), (ny * ny).mean(),
                (tx ** 2).mean(), (tx ** 4).mean(), (ty ** 2).mean(), (ty ** 4).mean()]
        return np.concatenate([scal, (x.T @ x / bs).ravel(), (y.T @ y / bs).ravel()])

    raw, bs = run_batches(stream, n_samples, batch, DEFAULT_BATCHES, workers)
    z = raw[:, :8]
    mx = raw[:, 8:8 + n * n].reshape(-1, n, n)
    my = raw[:, 8 + n * n:].reshape(-1, n, n)

    var_x = delta_method(z, _var_fn(0, 1), bs)
    var_y = delta_method(z, _var_fn(2, 3), bs)
    diff = delta_method(z, lambda m: (m[3] - m[2] ** 2) - (m[1] - m[0] ** 2), bs)

    def ratio(mom, i2, i4):
        c = mom.mean(axis=0)
        ev, evec = np.linalg.eigh(0.5 * (c + c.T))
        v = evec[:, -1]
        vv = np.einsum("i,bij,j->b", v, mom, v)
        cols = np.column_stack([z[:, i2], z[:, i4], vv])
        return float(ev[-1]), delta_method(cols, lambda m: (m[1] - m[0] ** 2) / (m[2] * m[0]), bs)

    lam_x, r_x = ratio(mx, 0, 1)
    lam_y, r_y = ratio(my, 2, 3)
    return {
        "var_x": var_x, "var_y": var_y, "diff": diff,
        "bound": n * body.lk2 ** 2, "lk2": body.lk2,
        "lambda2_x": lam_x, "lambda2_y": lam_y, "ratio_x": r_x, "ratio_y": r_y,
        "e_theta2_x": delta_method(z, lambda m: m[4], bs),
        "e_theta2_y": delta_method(z, lambda m: m[6], bs),
        "e_theta4_x": delta_method(z, lambda m: m[5], bs),
        "e_theta4_y": delta_method(z, lambda m: m[7], bs),
        "e_theta4_gap": delta_method(z, lambda m: m[5] - m[7], bs),
        "e_theta2_gap": delta_method(z, lambda m: m[4] - m[6], bs),
    }


def coordinate_moment_compare(p, n: int, axis: int, n_samples: int, stream: RngStream,
                              workers: int = 1) -> dict:
    """For ``theta = e_axis``: second and mixed moments of X and Y per coordinate.

    Returns, for every ``i != axis``, the gaps ``E<X,e_i>^2 - E<Y,e_i>^2`` (zero in
    law) and ``E<X,e_i>^2<X,theta>^2 - E<Y,e_i>^2<Y,theta>^2`` (non-negative).
    """
    direction = Direction.axis(n, axis)
    others = [i for i in range(n) if i != axis]

    def batch(s, bs):
        x, y = steiner_pairs(s, p, n, direction, bs)
        xo, yo = x[:, others] ** 2, y[:, others] ** 2
        xt, yt = x[:, axis] ** 2, y[:, axis] ** 2
        return np.concatenate([xo.mean(0), yo.mean(0), (xo * xt[:, None]).mean(0),
                               (yo * yt[:, None]).mean(0)])

    raw, bs = run_batches(stream, n_samples, batch, DEFAULT_BATCHES, workers)
    k = len(others)
    second = [delta_method(raw, (lambda j: lambda m: m[j] - m[k + j])(j), bs) for j in range(k)]
    mixed = [delta_method(raw, (lambda j: lambda m: m[2 * k + j] - m[3 * k + j])(j), bs)
             for j in range(k)]
    return {"second_gap": second, "mixed_gap": mixed}


def projection_decomposition_check(p, n: int, direction: Direction, n_samples: int,
                                   stream: RngStream, workers: int = 1, k_sigma: float = 4.0) -> dict:
    """``|sqrt Var|X|^2 - sqrt Var|P_E X|^2| <= sqrt Var|P_{E^perp} X|^2`` for ``E = theta^perp``.

    ``X`` is uniform on ``B_p^n``; the three variances share one sample pool.
    ``margin`` is the right side minus the left side.
    """
    theta = direction.theta

    def batch(s, bs):
        x = sample_ball_uniform(s, p, n, bs)
        n2 = (x * x).sum(1)
        t2 = (x @ theta) ** 2
        e2 = n2 - t2
        return [n2.mean(), (n2 * n2).mean(), e2.mean(), (e2 * e2).mean(), t2.mean(), (t2 * t2).mean()]

    z, bs = run_batches(stream, n_samples, batch, DEFAULT_BATCHES, workers)

    def variances(m):
        return m[1] - m[0] ** 2, m[3] - m[2] ** 2, m[5] - m[4] ** 2

    def margin(m):
        v, ve, vp = variances(m)
        return math.sqrt(max(vp, 0.0)) - abs(math.sqrt(max(v, 0.0)) - math.sqrt(max(ve, 0.0)))

    est = delta_method(z, margin, bs)
    return {
        "var_x": delta_method(z, lambda m: variances(m)[0], bs),
        "var_e": delta_method(z, lambda m: variances(m)[1], bs),
        "var_perp": delta_method(z, lambda m: variances(m)[2], bs),
        "margin": est,
        "passed": est.mean >= -k_sigma * est.stderr,
    }
