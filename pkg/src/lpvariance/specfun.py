"""Special functions and closed-form moments of the generalized Gaussian.

``g`` denotes a random variable with density ``exp(-|t|^p) / (2 Gamma(1 + 1/p))``
and ``S = (sum |g_i|^p)^(1/p)`` for ``n`` independent copies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import special

__all__ = [
    "PExponent",
    "as_exponent",
    "log_gamma",
    "reg_lower_inc_gamma",
    "moment_g",
    "moment_S",
    "log_ball_volume",
    "ball_volume",
]


@dataclass(frozen=True)
class PExponent:
    """A finite exponent ``p >= 1`` together with its dual ``p* = p / (p - 1)``.

    ``p_star`` is ``math.inf`` for ``p == 1``; check ``is_one`` rather than
    comparing against infinity.
    """

    p: float
    p_star: float = field(init=False)
    is_one: bool = field(init=False)

    def __post_init__(self):
        p = float(self.p)
        if not math.isfinite(p) or p < 1.0:
            raise ValueError(f"exponent must be finite and >= 1, got {self.p!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "is_one", p == 1.0)
        object.__setattr__(self, "p_star", math.inf if p == 1.0 else p / (p - 1.0))

    def __float__(self):
        return self.p


def as_exponent(p) -> PExponent:
    return p if isinstance(p, PExponent) else PExponent(p)


def _check_positive(name, x):
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"{name} must be finite and > 0, got {x!r}")


def log_gamma(x: float) -> float:
    """``ln Gamma(x)`` for finite ``x > 0``."""
    x = float(x)
    _check_positive("x", x)
    return math.lgamma(x)


def reg_lower_inc_gamma(a, x):
    """Regularized lower incomplete gamma ``P(a, x) = gamma(a, x) / Gamma(a)``.

    Accepts scalars or arrays for ``x``; ``a`` must be a positive scalar.
    """
    a = float(a)
    _check_positive("a", a)
    if isinstance(x, (int, float)):
        if not (x >= 0.0):
            raise ValueError(f"x must be >= 0, got {x!r}")
        return float(special.gammainc(a, x))
    out = special.gammainc(a, x)
    if (out != out).any():
        raise ValueError("x must be >= 0 and not NaN")
    return out


def moment_g(p, alpha: float) -> float:
    """``E|g|^alpha = Gamma((alpha + 1)/p) / Gamma(1/p)``."""
    p = as_exponent(p).p
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0:
        return 1.0
    return math.exp(log_gamma((alpha + 1.0) / p) - log_gamma(1.0 / p))


def moment_S(p, n: int, alpha: float) -> float:
    """``E S^alpha = Gamma((n + alpha)/p) / Gamma(n/p)``."""
    p = as_exponent(p).p
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0:
        return 1.0
    return math.exp(log_gamma((n + alpha) / p) - log_gamma(n / p))


def log_ball_volume(p, n: int) -> float:
    p = as_exponent(p).p
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * (math.log(2.0) + log_gamma(1.0 + 1.0 / p)) - log_gamma(1.0 + n / p)


def ball_volume(p, n: int) -> float:
    """Volume of the unit ball of ``l_p^n``: ``(2 Gamma(1 + 1/p))^n / Gamma(1 + n/p)``."""
    return math.exp(log_ball_volume(p, n))
