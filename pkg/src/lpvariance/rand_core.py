"""Reproducible random streams and exact samplers for the l_p machinery.

Every sampler draws from an :class:`RngStream`.  A stream is identified by a
``(seed, stream_id)`` pair plus an optional child path, and maps onto a numpy
``SeedSequence`` spawn key, so identical identifiers replay identical draws
and distinct identifiers give independent PCG64 streams.

The samplers are vectorized: ``size=None`` returns a single draw, an integer
returns that many independent draws stacked along axis 0.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .specfun import PExponent, as_exponent

__all__ = [
    "RngStream",
    "stream_id_for",
    "GSample",
    "ConePoint",
    "sample_gamma",
    "sample_gg",
    "sample_gs",
    "sample_cone",
    "sample_ball_uniform",
    "sample_haar_direction",
]

_MASK64 = (1 << 64) - 1


def stream_id_for(*key) -> int:
    """Stable 64-bit stream id for a task key such as ``("ratio", p, n, k)``.

    The id is the first 8 bytes (little endian) of the BLAKE2b digest of the
    ``repr`` of the key tuple, so it does not depend on ``PYTHONHASHSEED``.
    """
    digest = hashlib.blake2b(repr(tuple(key)).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class RngStream:
    """Single-owner random stream.

    Parameters
    ----------
    seed, stream_id : int
        64-bit identifiers. ``(seed, stream_id, path)`` fully determines the
        output sequence.
    path : tuple of int
        Child indices, extended by :meth:`child`.
    """

    __slots__ = ("seed", "stream_id", "path", "_gen")

    def __init__(self, seed: int, stream_id: int = 0, path: tuple = ()):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self.path = tuple(int(i) for i in path)
        self._gen = None

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.path))
            self._gen = np.random.Generator(np.random.PCG64(ss))
        return self._gen

    def child(self, index: int) -> "RngStream":
        """Independent sub-stream; does not consume draws from ``self``."""
        return RngStream(self.seed, self.stream_id, self.path + (index,))

    def children(self, count: int) -> list["RngStream"]:
        return [self.child(i) for i in range(count)]

    def fresh(self) -> "RngStream":
        """A new handle replaying this stream from its start."""
        return RngStream(self.seed, self.stream_id, self.path)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, path={self.path})"


@dataclass(frozen=True)
class GSample:
    """Raw generalized-Gaussian vectors ``g`` and their norms ``s = ||g||_p``."""

    g: np.ndarray
    s: np.ndarray
    p: PExponent


@dataclass(frozen=True)
class ConePoint:
    """Points ``y = g / s`` on the unit l_p sphere, distributed by cone measure."""

    y: np.ndarray
    p: PExponent


def _uniform_open(gen, size):
    # (0, 1]: keeps logs finite
    return 1.0 - gen.random(size)


def sample_gamma(stream: RngStream, shape: float, size=None):
    """Exact Gamma(shape, 1) draws.

    For ``shape < 1`` the boost ``W = W' U^(1/shape)`` with ``W' ~ Gamma(shape + 1)``
    is used, which stays exact for shapes as small as ``1/800``.
    """
    if not shape > 0:
        raise ValueError("shape must be > 0")
    gen = stream.generator
    if shape >= 1.0:
        return gen.standard_gamma(shape, size)
    w = gen.standard_gamma(shape + 1.0, size)
    u = _uniform_open(gen, size)
    return w * np.exp(np.log(u) / shape)


def _log_abs_gg(gen, p: float, size):
    # |g| = W^(1/p), W ~ Gamma(1/p), via the boost: ln|g| = ln(W')/p + ln U
    w = gen.standard_gamma(1.0 + 1.0 / p, size)
    u = _uniform_open(gen, size)
    sign = np.where(gen.random(size) < 0.5, -1.0, 1.0)
    return sign, np.log(w) / p + np.log(u)


def sample_gg(stream: RngStream, p, size=None):
    """Draws from the density ``exp(-|t|^p) / (2 Gamma(1 + 1/p))``."""
    p = as_exponent(p).p
    sign, log_abs = _log_abs_gg(stream.generator, p, size)
    out = sign * np.exp(log_abs)
    return float(out) if size is None else out


def _gs_logs(gen, p: float, n: int, size):
    shape = (n,) if size is None else (int(size), n)
    sign, log_abs = _log_abs_gg(gen, p, shape)
    log_s = logsumexp(p * log_abs, axis=-1) / p
    return sign, log_abs, log_s


def sample_gs(stream: RngStream, p, n: int, size=None) -> GSample:
    """``n`` i.i.d. generalized-Gaussian coordinates and their l_p norm."""
    pe = as_exponent(p)
    if n < 1:
        raise ValueError("n must be >= 1")
    sign, log_abs, log_s = _gs_logs(stream.generator, pe.p, n, size)
    return GSample(g=sign * np.exp(log_abs), s=np.exp(log_s), p=pe)


def sample_cone(stream: RngStream, p, n: int, size=None) -> ConePoint:
    """Cone-measure points ``G / S`` on the boundary of the unit l_p ball."""
    pe = as_exponent(p)
    if n < 1:
        raise ValueError("n must be >= 1")
    sign, log_abs, log_s = _gs_logs(stream.generator, pe.p, n, size)
    log_s = np.expand_dims(log_s, -1)
    return ConePoint(y=sign * np.exp(log_abs - log_s), p=pe)


def sample_ball_uniform(stream: RngStream, p, n: int, size=None):
    """Uniform points of the unit l_p ball: ``U^(1/n) G / S``."""
    pe = as_exponent(p)
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = stream.generator
    sign, log_abs, log_s = _gs_logs(gen, pe.p, n, size)
    log_r = np.log(_uniform_open(gen, None if size is None else int(size))) / n
    log_r = np.expand_dims(log_r - log_s, -1)
    return sign * np.exp(log_abs + log_r)


def sample_haar_direction(stream: RngStream, n: int, size=None):
    """Uniform (Haar) unit vectors in R^n."""
    shape = (n,) if size is None else (int(size), n)
    z = stream.generator.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)
