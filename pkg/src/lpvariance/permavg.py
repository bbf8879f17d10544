"""Averages over permutations of ``(sum_i |a_{i, pi(i)}|^q)^(1/q)`` and the
two-block decreasing-rearrangement expression that is equivalent to them.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .rand_core import RngStream, sample_gg

MAX_BRUTE_N = 8


@dataclass(frozen=True)
class RearrangementInput:
    a: np.ndarray
    q: float = 2.0

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("a must be a square matrix")
        if not np.isfinite(a).all():
            raise ValueError("entries must be finite")
        if not self.q >= 1.0:
            raise ValueError("q must be >= 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "q", float(self.q))

    @property
    def n(self) -> int:
        return self.a.shape[0]


def _qnorm(x, q, axis=-1):
    if math.isinf(q):
        return np.max(x, axis=axis, initial=0.0)
    return np.sum(x ** q, axis=axis) ** (1.0 / q)


def rearrangement_functional(inp: RearrangementInput) -> float:
    """``(1/n) sum_{k<=n} a*_k + ((1/n) sum_{k>n} (a*_k)^q)^(1/q)``."""
    n, q = inp.n, inp.q
    s = np.sort(np.abs(inp.a).ravel())[::-1]
    head = s[:n].sum() / n
    tail = s[n:]
    if tail.size == 0:
        return float(head)
    if math.isinf(q):
        return float(head + tail.max())
    return float(head + (np.sum(tail ** q) / n) ** (1.0 / q))


def brute_avg_permutations(inp: RearrangementInput) -> float:
    """Exact average over all ``n!`` permutations (``n <= 8``)."""
    n = inp.n
    if n > MAX_BRUTE_N:
        raise ValueError(f"brute force enumeration limited to n <= {MAX_BRUTE_N}")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    vals = np.abs(inp.a)[np.arange(n), perms]
    return float(_qnorm(vals, inp.q).mean())


def random_matrix_cases(stream: RngStream, n: int, n_cases: int, ps=(1.0, 1.5, 2.0, 4.0, 16.0)):
    """Generalized-Gaussian matrices cycling through ``ps``, plus one rank-one positive case."""
    cases = []
    for k in range(max(n_cases - 1, 0)):
        p = ps[k % len(ps)]
        cases.append(sample_gg(stream, p, (n, n)))
    u = np.abs(sample_gg(stream, 2.0, n))
    v = np.abs(sample_gg(stream, 2.0, n))
    cases.append(np.outer(u, v))
    return cases[:n_cases] if n_cases > 0 else []


def ratio_window_check(n_cases: int, n: int, q: float, stream: RngStream) -> dict:
    """Extremes of brute / rearrangement over random matrices (``n <= 7``)."""
    if n > 7:
        raise ValueError("n must be <= 7")
    ratios = []
    for a in random_matrix_cases(stream, n, n_cases):
        inp = RearrangementInput(a, q)
        ratios.append(brute_avg_permutations(inp) / rearrangement_functional(inp))
    ratios = np.array(ratios)
    return {"min": float(ratios.min()), "max": float(ratios.max()), "ratios": ratios}
