"""White-box test objectives and their oracle wrappers.

Quadratics f(x) = 0.5 x'Ax - b'x + c carry cached minimizers, coordinate
curvatures L_i = A_ii and convexity moduli, so benchmarks can report true
suboptimality without ever leaking values into a solver-visible path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .core import CoordinateSmoothness, Rng, as_vector, make_rng
from .oracle import NoiseModel, OrderOracle, StochasticOrderOracle


@dataclass
class QuadraticProblem:
    """f(x) = 0.5 <x, Ax> - <b, x> + c with A symmetric positive (semi)definite."""

    A: np.ndarray
    b: np.ndarray
    c: float = 0.0
    spec: dict | None = None  # generation recipe, for serialization
    x_star: np.ndarray = field(init=False)
    f_star: float = field(init=False)

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be a square matrix")
        if np.max(np.abs(A - A.T)) > 1e-12 * max(1.0, np.max(np.abs(A))):
            raise ValueError("A must be symmetric")
        self.A = (A + A.T) / 2.0
        self.b = as_vector(self.b, A.shape[0])
        # lstsq covers singular (PL, non-strongly-convex) instances
        x_star, _, _, _ = np.linalg.lstsq(self.A, self.b, rcond=None)
        grad_norm = np.linalg.norm(self.A @ x_star - self.b)
        if grad_norm > 1e-10 * max(1.0, np.linalg.norm(self.b)):
            raise ValueError("no finite minimizer: b is not in the range of A")
        self.x_star = x_star
        self.f_star = self.value(x_star)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def L(self) -> np.ndarray:
        """Coordinate curvatures L_i = A_ii."""
        return np.diag(self.A).copy()

    def smoothness(self, alpha: float = 0.0) -> CoordinateSmoothness:
        if np.any(np.diag(self.A) <= 0):
            raise ValueError("coordinate constants require a strictly positive diagonal")
        return CoordinateSmoothness(np.diag(self.A).copy(), alpha)

    def value(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(0.5 * x @ (self.A @ x) - self.b @ x + self.c)

    def grad(self, x) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=np.float64) - self.b

    def suboptimality(self, x) -> float:
        """White-box gap f(x) - f*; >= -1e-12 up to rounding."""
        return self.value(x) - self.f_star

    def grad_norm(self, x) -> float:
        return float(np.linalg.norm(self.grad(x)))

    def dual_grad_norm(self, x, alpha: float) -> float:
        """Weighted dual norm of the gradient, sqrt(sum g_i^2 / L_i^(1-alpha))."""
        g = self.grad(x)
        return float(np.sqrt(np.sum(g**2 / np.diag(self.A) ** (1.0 - alpha))))

    def smoothness_constant(self) -> float:
        """Euclidean smoothness constant (largest eigenvalue)."""
        return float(np.linalg.eigvalsh(self.A)[-1])

    def mu_euclidean(self) -> float:
        """Euclidean strong-convexity modulus (smallest eigenvalue)."""
        return float(np.linalg.eigvalsh(self.A)[0])

    def mu_alpha(self, alpha: float) -> float:
        """Strong-convexity modulus in the L^(1-alpha)-weighted norm.

        Largest mu with A >= mu * diag(L_i^(1-alpha)); a generalized
        eigenvalue computation, valid for any symmetric A with positive
        diagonal. alpha = 1 reduces to the Euclidean modulus.
        """
        d = np.diag(self.A) ** (1.0 - alpha)
        if np.any(d <= 0):
            raise ValueError("weighted modulus requires a strictly positive diagonal")
        vals = scipy.linalg.eigh(self.A, np.diag(d), eigvals_only=True)
        return float(vals[0])

    def pl_modulus(self) -> float:
        """Largest mu with ||grad f||^2 >= 2 mu (f - f*) everywhere.

        For quadratics this is the smallest positive eigenvalue of A,
        so it is defined for singular (merely PL) instances too.
        """
        w = np.linalg.eigvalsh(self.A)
        pos = w[w > 1e-12 * max(1.0, w[-1])]
        if pos.size == 0:
            raise ValueError("zero matrix has no PL modulus")
        return float(pos[0])

    def to_json(self) -> str:
        """Reproducible description (generation recipe if known, else matrices)."""
        if self.spec is not None:
            return json.dumps({"kind": "generated", **self.spec})
        return json.dumps({"kind": "explicit", "A": self.A.tolist(),
                           "b": self.b.tolist(), "c": self.c})

    @classmethod
    def from_json(cls, text: str) -> "QuadraticProblem":
        data = json.loads(text)
        if data.get("kind") == "generated":
            return make_quadratic(data["d"], np.asarray(data["spectrum"]),
                                  rotation_seed=data["rotation_seed"],
                                  b_scale=data.get("b_scale", 1.0),
                                  rotation=data.get("rotation", 2.0))
        return cls(np.asarray(data["A"]), np.asarray(data["b"]), data.get("c", 0.0))


def make_quadratic(d: int, spectrum, rotation_seed: int = 0,
                   b_scale: float = 1.0, rotation: float = 2.0) -> QuadraticProblem:
    """Rotated quadratic A = Q' diag(spectrum) Q with random b.

    Q = expm(rotation * K) for a seeded random skew-symmetric K of unit
    spectral norm, so ``rotation`` dials eigenbasis mixing continuously:
    0 keeps A diagonal (coordinate methods see a separable problem),
    while values >= ~2 mix thoroughly. Instances are reproducible from
    (d, spectrum, rotation_seed, b_scale, rotation) alone.
    """
    spectrum = as_vector(spectrum, d)
    if np.any(spectrum <= 0):
        raise ValueError("spectrum must be positive")
    if rotation < 0:
        raise ValueError("rotation must be nonnegative")
    rng = make_rng(rotation_seed)
    g = rng.standard_normal((d, d))
    if rotation > 0 and d > 1:
        skew = (g - g.T) / 2.0
        skew /= np.linalg.norm(skew, 2)
        q = scipy.linalg.expm(rotation * skew)
        A = q.T @ (spectrum[:, None] * q)
    else:
        A = np.diag(spectrum)
    b = b_scale * rng.standard_normal(d)
    prob = QuadraticProblem(A, b, spec={
        "d": d, "spectrum": spectrum.tolist(),
        "rotation_seed": rotation_seed, "b_scale": b_scale,
        "rotation": rotation,
    })
    return prob


def log_uniform_spectrum(d: int, lo: float, hi: float) -> np.ndarray:
    """Deterministic log-spaced spectrum in [lo, hi], smallest first."""
    return np.geomspace(lo, hi, d)


def default_benchmark_problem() -> QuadraticProblem:
    """The d=100 ill-conditioned instance used by the bundled experiments.

    Euclidean condition number 1e3; the partial rotation keeps the
    weighted modulus mu_0 large enough that every bundled method reaches
    a 1e-6 gap within a few tens of thousands of iterations, which is
    what makes the speed orderings visible at desk scale.
    """
    return make_quadratic(100, log_uniform_spectrum(100, 1.0, 1e3),
                          rotation_seed=2024, rotation=0.4)


def as_order_oracle(p: QuadraticProblem, noise: NoiseModel | None = None) -> OrderOracle:
    """Wrap the problem behind a comparison-only oracle."""
    return OrderOracle(p.value, p.dim, noise)


@dataclass
class StochasticQuadratic:
    """Realization-indexed quadratic families with E_xi f(x, xi) = f(x) + const.

    kind "additive": f(x, xi) = f(x) + <xi, x> with zero-mean Gaussian xi.
    kind "shifted":  f(x, xi) = 0.5 ||x - xi||^2 with xi centered at the
    base minimizer, so the expectation is the base objective up to a
    constant. Both are quadratics in x, so the sign of a symmetric-probe
    comparison equals the sign of the directional derivative exactly.
    """

    base: QuadraticProblem
    kind: str = "additive"
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("additive", "shifted"):
            raise ValueError(f"unknown realization model {self.kind!r}")
        if self.kind == "shifted" and not np.allclose(self.base.A, np.eye(self.base.dim)):
            raise ValueError("shifted model assumes the identity quadratic")

    @property
    def dim(self) -> int:
        return self.base.dim

    def sample_realization(self, rng: Rng) -> np.ndarray:
        if self.kind == "additive":
            return self.sigma * rng.standard_normal(self.dim)
        return self.base.x_star + self.sigma * rng.standard_normal(self.dim)

    def value(self, x, xi) -> float:
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "additive":
            return self.base.value(x) + float(np.dot(xi, x))
        return float(0.5 * np.sum((x - xi) ** 2))

    def grad(self, x, xi) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "additive":
            return self.base.grad(x) + xi
        return x - xi

    def smoothness_constant(self) -> float:
        """Euclidean smoothness of f(., xi) (realization independent)."""
        if self.kind == "additive":
            return self.base.smoothness_constant()
        return 1.0

    def as_oracle(self, seed: int | None = 0, keep_log: bool = False) -> StochasticOrderOracle:
        return StochasticOrderOracle(self.value, self.dim,
                                     self.sample_realization, seed=seed,
                                     keep_log=keep_log)


def make_custom_problem(f: Callable[[np.ndarray], float], dim: int,
                        noise: NoiseModel | None = None) -> OrderOracle:
    """Comparison oracle over a user-supplied objective (smoke-level hook)."""
    return OrderOracle(f, dim, noise)
