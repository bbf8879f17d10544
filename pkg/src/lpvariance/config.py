"""Proxy windows for the unnamed absolute constants, and the run configuration.

The theorems being checked only assert the existence of absolute constants.
Every numeric window below is a generous stand-in for such a constant; checks
read them from a :class:`Windows` instance instead of hard-coding them.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Windows:
    sigma_k: float = 4.0
    epsi: tuple = (0.05, 20.0)
    remark: tuple = (0.8, 1.25)
    haar_threshold: float = 0.05
    haar_fraction_min: float = 0.95
    orlicz: tuple = (0.1, 10.0)
    permavg: tuple = (0.2, 5.0)
    ratio_max: float = 30.0
    term_max: float = 30.0
    scale: tuple = (0.05, 20.0)
    steiner_const: float = 10.0
    sym_sum_const: float = 10.0
    khintchine: tuple = (0.5, 1.05)
    lemma33b_min: float = 0.02

    @classmethod
    def from_dict(cls, d: dict) -> "Windows":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown window keys: {sorted(unknown)}")
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in d.items()})

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(self).items()}


def in_window(value: float, window: tuple, slack: float = 0.0) -> bool:
    lo, hi = window
    return value + slack >= lo and value - slack <= hi


THETA_MODES = ("haar", "diag", "axis")


@dataclass
class RunConfig:
    """Everything a CLI subcommand needs; JSON round-trips exactly."""

    p: list = field(default_factory=lambda: [1.0, 2.0, 4.0, 16.0, 64.0])
    n: list = field(default_factory=lambda: [8, 16, 32, 64])
    theta: str = "haar"
    n_theta: int = 3
    samples: int = 100_000
    seed: int = 20160101
    threads: int = 1
    out: str = "-"
    format: str = "csv"
    windows: Windows = field(default_factory=Windows)

    def validate(self) -> "RunConfig":
        for p in self.p:
            if not (math.isfinite(p) and p >= 1.0):
                raise ValueError(f"p values must be finite and >= 1, got {p}")
        for n in self.n:
            if int(n) != n or n < 1:
                raise ValueError(f"n values must be positive integers, got {n}")
        if self.samples < 30_000:
            raise ValueError("samples must be >= 30000")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.theta not in THETA_MODES and not self.theta.startswith("file:"):
            raise ValueError(f"theta must be one of {THETA_MODES} or file:PATH")
        if self.n_theta < 1:
            raise ValueError("n_theta must be >= 1")
        return self

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["windows"] = self.windows.to_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "windows" in d:
            d["windows"] = Windows.from_dict(d["windows"])
        if "p" in d:
            d["p"] = [float(v) for v in d["p"]]
        if "n" in d:
            d["n"] = [int(v) for v in d["n"]]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))
