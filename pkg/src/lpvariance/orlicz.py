"""Orlicz function of ``X = |g|^(p-1)`` at ``q = 2`` and its Luxemburg norm.

With ``a = 2 - 1/p``, ``p* = p/(p-1)`` and ``z(t) = t^(-p*)``,

    M(s) = c_p * int_0^s [ t * gamma_lower(a, z(t)) + exp(-z(t)) ] dt,
    c_p  = 2 / (p Gamma(1 + 1/p)).

The integrand ``h`` is increasing (``h'(t) = gamma_lower(a, z(t))``), so ``M``
is convex.  Below ``t0 = 700^(-1/p*)`` we have ``h(t) = Gamma(a) t`` to double
precision.  Above ``t0`` the integral is accumulated on a cached log-spaced
panel grid with Gauss-Legendre nodes; a query adds one partial panel, so each
value is exact to rounding rather than interpolated.
"""
from __future__ import annotations

import functools
import math

import numpy as np
from scipy import special

from .batching import MomentEstimate
from .specfun import as_exponent
from .weights import Direction, estimate_psi_phi

_Z_FLUSH = 700.0
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
_PANELS_PER_DECADE = 16
_T_MAX = 1e12


class UnsupportedExponent(ValueError):
    pass


class OrliczM:
    """Tabulated Orlicz function for a fixed ``p > 1``."""

    def __init__(self, p):
        pe = as_exponent(p)
        if pe.is_one:
            raise UnsupportedExponent("p = 1 degenerates the Orlicz integrand; "
                                      "use the direct estimate E psi ~ 1 instead")
        self.p = pe
        self.a = 2.0 - 1.0 / pe.p
        self.gamma_a = math.gamma(self.a)
        self.normalization = 2.0 / (pe.p * math.gamma(1.0 + 1.0 / pe.p))
        self.t0 = _Z_FLUSH ** (-1.0 / pe.p_star)
        du = math.log(10.0) / _PANELS_PER_DECADE
        k = max(1, math.ceil((math.log(_T_MAX) - math.log(self.t0)) / du))
        self._du = du
        self._log_nodes = math.log(self.t0) + du * np.arange(k + 1)
        panel = self._integrate_log(self._log_nodes[:-1], self._log_nodes[1:])
        base = 0.5 * self.gamma_a * self.t0 ** 2
        self._cum = base + np.concatenate([[0.0], np.cumsum(panel)])
        self._t_max = float(np.exp(self._log_nodes[-1]))

    def integrand(self, t):
        """``h(t) = t * gamma_lower(a, t^-p*) + exp(-t^-p*)`` for ``t > 0``."""
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore", divide="ignore"):
            z = np.exp(-self.p.p_star * np.log(t))
        flush = z > _Z_FLUSH
        zc = np.where(flush, _Z_FLUSH, z)
        val = t * self.gamma_a * special.gammainc(self.a, zc) + np.exp(-zc)
        return np.where(flush, t * self.gamma_a, val)

    def _integrate_log(self, u_lo, u_hi):
        u_lo = np.asarray(u_lo, dtype=float)[..., None]
        u_hi = np.asarray(u_hi, dtype=float)[..., None]
        half = 0.5 * (u_hi - u_lo)
        u = u_lo + half * (_GL_X + 1.0)
        t = np.exp(u)
        return (half * (_GL_W * self.integrand(t) * t)).sum(axis=-1)

    def _raw(self, s):
        s = np.asarray(s, dtype=float)
        out = np.empty_like(s)
        low = s <= self.t0
        out[low] = 0.5 * self.gamma_a * s[low] ** 2
        mid = (~low) & (s <= self._t_max)
        if mid.any():
            ls = np.log(s[mid])
            k = np.clip(((ls - self._log_nodes[0]) // self._du).astype(int), 0,
                        self._log_nodes.size - 2)
            out[mid] = self._cum[k] + self._integrate_log(self._log_nodes[k], ls)
        high = s > self._t_max
        if high.any():
            # h(t) = 1 - (1 - 1/a) t^-p* + O(t^-2p*) beyond the table
            ps = self.p.p_star
            sh = s[high]
            corr = (self._t_max ** (1 - ps) - sh ** (1 - ps)) / (ps - 1.0)
            out[high] = self._cum[-1] + (sh - self._t_max) - (1.0 - 1.0 / self.a) * corr
        return out

    def __call__(self, s):
        return eval_M(self, s)

    def table(self, n_points: int = 400):
        """Monotone grid of ``(s, M(s))`` pairs spanning the tabulated range."""
        s = np.logspace(math.log10(self.t0) - 3, math.log10(self._t_max), n_points)
        return s, eval_M(self, s)


@functools.lru_cache(maxsize=64)
def orlicz_for(p: float) -> OrliczM:
    return OrliczM(p)


def eval_M(m: OrliczM, s):
    """``M(s)`` for scalar or array ``s >= 0``."""
    arr = np.asarray(s, dtype=float)
    if (arr < 0).any() or np.isnan(arr).any():
        raise ValueError("M is defined for s >= 0")
    out = m.normalization * m._raw(arr)
    return float(out) if np.ndim(s) == 0 else out


def luxemburg_norm(m: OrliczM, x, rtol: float = 1e-13) -> float:
    """``inf{rho > 0 : sum_i M(|x_i| / rho) <= 1}`` by bracketing and log-bisection."""
    ax = np.abs(np.asarray(x, dtype=float).reshape(-1))
    ax = ax[ax > 0]
    if ax.size == 0:
        return 0.0

    def excess(rho):
        return float(np.sum(eval_M(m, ax / rho))) - 1.0

    rho = float(ax.max())
    if excess(rho) > 0:
        lo = rho
        hi = 2.0 * rho
        while excess(hi) > 0:
            lo, hi = hi, 2.0 * hi
    else:
        hi = rho
        lo = 0.5 * rho
        while excess(lo) <= 0:
            hi, lo = lo, 0.5 * lo
    while (hi - lo) > rtol * hi:
        mid = math.sqrt(lo * hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return hi


def luxemburg_certificate(m: OrliczM, x, rho: float) -> float:
    """``sum_i M(|x_i| / rho)``; equals 1 at the norm for nonzero ``x``."""
    ax = np.abs(np.asarray(x, dtype=float).reshape(-1))
    return float(np.sum(eval_M(m, ax / rho)))


def orlicz_vs_mc(p, n: int, direction: Direction, n_samples: int, stream,
                 workers: int = 1) -> MomentEstimate:
    """Monte Carlo ``E phi_theta`` divided by ``||theta||_M``."""
    m = orlicz_for(as_exponent(p).p)
    norm = luxemburg_norm(m, direction.theta)
    _, ephi, _ = estimate_psi_phi(p, n, direction, n_samples, stream, workers)
    return MomentEstimate(ephi.mean / norm, ephi.stderr / norm, ephi.n_samples, ephi.n_batches)
