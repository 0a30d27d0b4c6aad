"""Vectors, seeded randomness, and coordinate-smoothness bookkeeping.

Everything downstream (line search, solvers, benchmarks) builds on the
three primitives here: validated float vectors, a reproducible RNG, and
the power-weighted coordinate sampling distribution.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Rng = np.random.Generator


def make_rng(seed: int | None) -> Rng:
    """Seeded PCG64 generator; same seed gives bit-identical streams."""
    return np.random.default_rng(seed)


def spawn_rngs(seed: int, n: int) -> list[Rng]:
    """n statistically independent generators for parallel runs."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Validate and return a 1-D float64 array with finite entries."""
    v = np.ascontiguousarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    if dim is not None and v.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.size}")
    return v


@dataclass(frozen=True)
class CoordinateSmoothness:
    """Per-coordinate curvature constants L_i and the sampling exponent.

    alpha is restricted to [0, 1]; the derived quantities are the power
    sum ``s_alpha`` and the sampling distribution p_i = L_i^alpha / S_alpha.
    alpha = 0 always yields the uniform distribution, regardless of L.
    """

    L: np.ndarray
    alpha: float = 0.0
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        L = as_vector(self.L)
        if np.any(L <= 0):
            raise ValueError("all coordinate constants L_i must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "_cdf", np.cumsum(self.distribution()))

    @property
    def dim(self) -> int:
        return self.L.size

    def s_alpha(self) -> float:
        """Power sum S_alpha = sum_i L_i^alpha."""
        return float(np.sum(self.L**self.alpha))

    def distribution(self) -> np.ndarray:
        """Sampling probabilities p_i = L_i^alpha / S_alpha (sum to 1)."""
        w = self.L**self.alpha
        return w / w.sum()

    def with_alpha(self, alpha: float) -> "CoordinateSmoothness":
        return CoordinateSmoothness(self.L, alpha)

    def sample(self, rng: Rng) -> int:
        """Draw a coordinate index by CDF inversion (O(log d))."""
        i = int(np.searchsorted(self._cdf, rng.random(), side="right"))
        return min(i, self.dim - 1)


def sample_coordinate(p, rng: Rng) -> int:
    """Draw an index from an explicit probability vector by CDF inversion."""
    p = as_vector(p)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("not a probability vector")
    i = int(np.searchsorted(np.cumsum(p), rng.random(), side="right"))
    return min(i, p.size - 1)


def sample_unit_sphere(d: int, rng: Rng) -> np.ndarray:
    """Uniform direction on the Euclidean unit sphere in R^d.

    Standard-normal draw, normalized; rotation invariance is inherited
    from the Gaussian. The zero draw is resampled (probability zero).
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    while True:
        u = rng.standard_normal(d)
        n = np.linalg.norm(u)
        if n > 0:
            return u / n


def sample_unit_sphere_batch(n: int, d: int, rng: Rng) -> np.ndarray:
    """n independent uniform sphere directions as rows of an (n, d) array."""
    if d < 1 or n < 1:
        raise ValueError("n and d must be >= 1")
    u = rng.standard_normal((n, d))
    norms = np.linalg.norm(u, axis=1, keepdims=True)
    bad = norms[:, 0] == 0.0
    while np.any(bad):
        u[bad] = rng.standard_normal((int(bad.sum()), d))
        norms[bad] = np.linalg.norm(u[bad], axis=1, keepdims=True)
        bad = norms[:, 0] == 0.0
    return u / norms
