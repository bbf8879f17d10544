"""Deterministic grid-quadrature oracles in dimensions 2 and 3.

These are the independent ground truth for the Monte Carlo estimators.  Each
oracle is evaluated on a sequence of grids whose spacing halves, and the
result is certified only when the last two levels agree to ``rtol``
(relative).  Integrands that are smooth away from grid-aligned kinks are
Richardson-extrapolated at order 2; indicator-type integrands are compared
raw.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .projest import hyperplane_basis
from .specfun import as_exponent
from .steiner import projection_gauge
from .weights import Direction, signed_power


class OracleUncertified(RuntimeError):
    """Successive grid refinements disagree by more than the tolerance."""


@dataclass(frozen=True)
class QuadConfig:
    grid_points_per_axis: int | None = None
    refinement_levels: int = 3
    rtol: float = 1e-4
    boundary_subdivision: int = 8

    def __post_init__(self):
        if self.refinement_levels < 2:
            raise ValueError("refinement_levels must be >= 2")

    def finest(self, n: int) -> int:
        if self.grid_points_per_axis is not None:
            return int(self.grid_points_per_axis)
        return 2048 if n == 2 else 512

    def levels(self, n: int) -> list[int]:
        g = self.finest(n)
        return [max(4, g >> k) // 2 * 2 for k in range(self.refinement_levels - 1, -1, -1)]


@dataclass(frozen=True)
class QuadResult:
    value: float
    delta: float
    levels: tuple

    def __float__(self):
        return self.value


def _certify(values, scale, cfg: QuadConfig, order=None) -> QuadResult:
    vals = np.asarray(values, dtype=float)
    if order is not None:
        f = 2.0 ** order
        vals = (f * vals[1:] - vals[:-1]) / (f - 1.0)
    delta = abs(vals[-1] - vals[-2]) / max(abs(scale), 1e-300)
    if not delta <= cfg.rtol:
        raise OracleUncertified(f"refinement delta {delta:.3g} exceeds {cfg.rtol:g} "
                                f"(levels {tuple(float(v) for v in values)})")
    return QuadResult(float(vals[-1]), float(delta), tuple(float(v) for v in values))


def _check_dim(n):
    if n not in (2, 3):
        raise ValueError("quadrature oracles support n in {2, 3} only")


def _midpoints(lo, hi, m):
    h = (hi - lo) / m
    return lo + h * (np.arange(m) + 0.5), h


def _as_monomials(exponents, n):
    ex = np.atleast_2d(np.asarray(exponents, dtype=int))
    if ex.shape[1] != n or (ex < 0).any():
        raise ValueError(f"exponents must be non-negative integer tuples of length {n}")
    return ex


def _smooth_map(m):
    """Midpoint nodes on [-1, 1] pushed through ``s = u(15 - 10u^2 + 3u^4)/8``.

    The map has ``s'(+-1) = s''(+-1) = 0``, which flattens the
    ``(1 - |s|^p)^(1/p)`` endpoint singularity of ball fibers.
    Returns nodes and weights (Jacobian times spacing).
    """
    u, h = _midpoints(-1.0, 1.0, m)
    s = u * (15.0 - 10.0 * u ** 2 + 3.0 * u ** 4) / 8.0
    w = 15.0 * (1.0 - u ** 2) ** 2 / 8.0 * h
    return s, w


def quad_moments_ball(p, n: int, exponents, config: QuadConfig = QuadConfig()) -> QuadResult:
    """``E[sum_k prod_i X_i^{e_ki}]`` for ``X`` uniform on ``B_p^n``.

    ``exponents`` is one exponent tuple or a list of them (summed).  The
    coordinates are nested fibers: ``x_1`` ranges over ``[-1, 1]``, each later
    coordinate over ``|x_k| <= r_k = (1 - sum_{i<k} |x_i|^p)^(1/p)`` and is
    written as ``r_k s`` with ``s`` on a smoothed midpoint grid.  The last
    coordinate is integrated exactly along its fiber.
    """
    pv = as_exponent(p).p
    _check_dim(n)
    ex = _as_monomials(exponents, n)
    values, scales = [], []
    for m in config.levels(n):
        s, w = _smooth_map(m)
        xs, wt = [s], w
        if n == 3:
            r2 = (1.0 - np.abs(s) ** pv) ** (1.0 / pv)
            xs = [np.repeat(s, m), (r2[:, None] * s[None, :]).ravel()]
            wt = (w[:, None] * (r2[:, None] * w[None, :])).ravel()
        rest = np.maximum(1.0 - sum(np.abs(x) ** pv for x in xs), 0.0)
        c = rest ** (1.0 / pv)
        vol = np.sum(wt * 2.0 * c)
        total = 0.0
        abs_total = 0.0
        for row in ex:
            k = row[-1]
            fiber = wt * 2.0 * c ** (k + 1) / (k + 1)
            lead = np.ones_like(c)
            alead = np.ones_like(c)
            for x, e in zip(xs, row[:-1]):
                lead = lead * x ** e
                alead = alead * np.abs(x) ** e
            abs_total += np.sum(alead * fiber)
            if k % 2 == 0:
                total += np.sum(lead * fiber)
        values.append(total / vol)
        scales.append(abs_total / vol)
    return _certify(values, scales[-1], config)


def _circumradius(p, n):
    return float(n) ** max(0.0, 0.5 - 1.0 / p)


def quad_moments_projection(p, n: int, direction: Direction, f,
                            config: QuadConfig = QuadConfig()) -> QuadResult:
    """``E f(X)`` for ``X`` uniform on the projection of ``B_p^n`` onto ``theta^perp``.

    ``f`` takes an ``(m, n)`` array of ambient points and returns ``m`` values.
    For ``n = 3`` the plane is parametrized by :func:`hyperplane_basis` and
    gridded over the circumscribed square; boundary cells are subdivided.
    For ``n = 2`` the projection is a segment integrated by the midpoint rule.
    """
    pv = as_exponent(p).p
    _check_dim(n)
    theta = direction.theta
    basis = hyperplane_basis(theta)
    if n == 2:
        u = basis[0]
        half = 1.0 / float(projection_gauge(pv, theta, u[None, :])[0])
        values, scales = [], []
        for m in config.levels(2):
            t, _ = _midpoints(-half, half, m)
            fx = np.asarray(f(t[:, None] * u), dtype=float)
            values.append(float(np.broadcast_to(fx, t.shape).mean()))
            scales.append(float(np.abs(np.broadcast_to(fx, t.shape)).mean()))
        return _certify(values, max(scales[-1], 1e-300), config, order=2)

    radius = _circumradius(pv, n)
    lip = float(n) ** max(0.0, 1.0 / pv - 0.5)
    sub = config.boundary_subdivision
    values, scales = [], []
    for m in config.levels(3):
        t, h = _midpoints(-radius, radius, m)
        uu, vv = np.meshgrid(t, t, indexing="ij")
        pts = np.column_stack([uu.ravel(), vv.ravel()])
        gauge = projection_gauge(pv, theta, pts @ basis)
        band = lip * h * 0.75
        interior = gauge <= 1.0 - band
        edge = np.abs(gauge - 1.0) < band
        w_parts, f_parts, a_parts = [], [], []
        if interior.any():
            fx = np.broadcast_to(np.asarray(f(pts[interior] @ basis), dtype=float), (interior.sum(),))
            w_parts.append(float(interior.sum()))
            f_parts.append(float(fx.sum()))
            a_parts.append(float(np.abs(fx).sum()))
        if edge.any():
            off = (np.arange(sub) + 0.5) / sub - 0.5
            du, dv = np.meshgrid(off * h, off * h, indexing="ij")
            d = np.column_stack([du.ravel(), dv.ravel()])
            fine = (pts[edge][:, None, :] + d[None, :, :]).reshape(-1, 2)
            g_fine = projection_gauge(pv, theta, fine @ basis)
            keep = g_fine <= 1.0
            fx = np.broadcast_to(np.asarray(f(fine[keep] @ basis), dtype=float), (keep.sum(),))
            w = 1.0 / sub ** 2
            w_parts.append(keep.sum() * w)
            f_parts.append(float(fx.sum()) * w)
            a_parts.append(float(np.abs(fx).sum()) * w)
        area = sum(w_parts)
        values.append(sum(f_parts) / area)
        scales.append(sum(a_parts) / area)
    return _certify(values, max(scales[-1], 1e-300), config)


def quad_epsi(p, n: int, direction: Direction, config: QuadConfig = QuadConfig(),
              eps: float = 1e-12) -> QuadResult:
    """``E psi_theta`` by tensor midpoint quadrature against the product density.

    Each axis uses the substitution ``x = u|u|``, which turns the cusp of
    ``|x|^(p-1)`` at the origin into the smooth factor ``2|u|^(2p-1)``.
    """
    pe = as_exponent(p)
    pv = pe.p
    _check_dim(n)
    theta = direction.theta
    radius = 2.0 * math.log(1.0 / eps) ** (1.0 / pv)
    norm = 1.0 / (2.0 * math.gamma(1.0 + 1.0 / pv))
    values = []
    for m in config.levels(n):
        u, h = _midpoints(-math.sqrt(radius), math.sqrt(radius), m)
        x = u * np.abs(u)
        dens = norm * np.exp(-np.abs(x) ** pv) * 2.0 * np.abs(u) * h
        a = signed_power(x, pe)
        if n == 2:
            total = np.sum(np.abs(theta[0] * a[:, None] + theta[1] * a[None, :])
                           * dens[:, None] * dens[None, :])
        else:
            inner = theta[1] * a[:, None] + theta[2] * a[None, :]
            dd = dens[:, None] * dens[None, :]
            total = 0.0
            for i in range(m):
                total += dens[i] * np.sum(np.abs(theta[0] * a[i] + inner) * dd)
        values.append(float(total))
    return _certify(values, values[-1], config, order=2)
