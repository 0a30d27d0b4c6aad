"""Ternary comparison oracles: the only channel solvers have to the objective.

A compare returns sign(f(x) - f(y) + noise) in {-1, 0, +1} and never the
function values themselves. sign(0) = 0 by convention; every consumer
states its own tie rule. The stochastic variant evaluates both points on
one shared realization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import Rng, as_vector, make_rng

Sign3 = int  # -1, 0, or +1


def sign3(v: float) -> Sign3:
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


@dataclass(frozen=True)
class NoiseModel:
    """Bounded deterministic comparison noise |delta(x, y)| <= delta_max.

    The default bounded instance is delta_max * cos(x_1) * sin(y_1), a
    fixed pure function of the compared points (repeated compares of the
    same pair agree); pass ``fn`` to substitute another bounded form.
    """

    delta_max: float = 0.0
    fn: Callable[[np.ndarray, np.ndarray], float] | None = None

    def __post_init__(self):
        if self.delta_max < 0:
            raise ValueError("delta_max must be nonnegative")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls(0.0)

    @classmethod
    def bounded(cls, delta_max: float, fn=None) -> "NoiseModel":
        return cls(delta_max, fn)

    def __call__(self, x: np.ndarray, y: np.ndarray) -> float:
        if self.delta_max == 0.0:
            return 0.0
        if self.fn is not None:
            d = float(self.fn(x, y))
            if abs(d) > self.delta_max + 1e-15:
                raise ValueError("noise function exceeded its stated bound")
            return d
        return self.delta_max * math.cos(x[0]) * math.sin(y[0])


class OrderOracle:
    """Pairwise order access to an objective, with call accounting.

    Wraps an opaque evaluator f; solvers only ever see the sign of the
    (noisy) difference. One counter increment per successful compare.
    """

    def __init__(self, f: Callable[[np.ndarray], float], dim: int,
                 noise: NoiseModel | None = None):
        self._f = f
        self.dim = dim
        self.noise = noise if noise is not None else NoiseModel.none()
        self._calls = 0

    @property
    def calls(self) -> int:
        return self._calls

    def _eval(self, x: np.ndarray) -> float:
        v = float(self._f(x))
        if not math.isfinite(v):
            raise ValueError("objective returned a non-finite value")
        return v

    def compare(self, x, y) -> Sign3:
        """sign(f(x) - f(y) + delta(x, y)); increments the call counter."""
        # fast path: arrays coming from LineOracle are already validated
        if not (type(x) is np.ndarray and x.dtype == np.float64 and x.shape == (self.dim,)):
            x = as_vector(x, self.dim)
        if not (type(y) is np.ndarray and y.dtype == np.float64 and y.shape == (self.dim,)):
            y = as_vector(y, self.dim)
        s = sign3(self._eval(x) - self._eval(y) + self.noise(x, y))
        self._calls += 1
        return s


class StochasticOrderOracle:
    """Compares f(x, xi) and f(y, xi) on one shared realization xi.

    The realization is drawn from a seeded sampler per compare, so runs
    are reproducible given the seed; ``draw_realization`` plus
    ``compare_on`` let white-box callers couple other computations
    (e.g. a gradient-based smoothing radius) to the same realization.
    """

    def __init__(self, f: Callable[[np.ndarray, np.ndarray], float], dim: int,
                 sampler: Callable[[Rng], np.ndarray], seed: int | None = 0,
                 keep_log: bool = False):
        self._f = f
        self.dim = dim
        self._sampler = sampler
        self.rng = make_rng(seed)
        self._calls = 0
        self.realization_log: list[np.ndarray] | None = [] if keep_log else None

    @property
    def calls(self) -> int:
        return self._calls

    def draw_realization(self) -> np.ndarray:
        return self._sampler(self.rng)

    def _eval(self, x: np.ndarray, xi) -> float:
        v = float(self._f(x, xi))
        if not math.isfinite(v):
            raise ValueError("objective returned a non-finite value")
        return v

    def compare_on(self, x, y, xi) -> Sign3:
        """Compare both points on the given realization."""
        x = as_vector(x, self.dim)
        y = as_vector(y, self.dim)
        s = sign3(self._eval(x, xi) - self._eval(y, xi))
        self._calls += 1
        if self.realization_log is not None:
            self.realization_log.append(np.asarray(xi))
        return s

    def compare(self, x, y) -> Sign3:
        """Draw one realization and compare both points on it."""
        return self.compare_on(x, y, self.draw_realization())
