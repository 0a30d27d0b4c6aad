"""One-dimensional minimization along a ray using only order comparisons.

The golden-ratio loop consumes exactly one compare per iteration and
shrinks the bracket by rho = (sqrt(5) - 1) / 2 each time, so the total
comparison count for tolerance t on [a, b] is ceil(log((b-a)/t) / log Phi).
Ties (compare == 0) take the else branch, which keeps constant slices
well defined. ``bracket_minimum`` supplies the interval the golden-ratio
loop needs, by symmetric doubling from an initial radius.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import as_vector
from .oracle import OrderOracle, Sign3

PHI = (1.0 + math.sqrt(5.0)) / 2.0
RHO = 1.0 / PHI  # = (sqrt(5) - 1) / 2

CONVERGED = "converged"
HIT_MAX_EXPANSION = "hit-max-expansion"


class LineOracle:
    """Order access to the slice g(eta) = f(x + eta * e)."""

    def __init__(self, oracle: OrderOracle, x, e, coord: int | None = None):
        self.oracle = oracle
        self.x = as_vector(x, oracle.dim)
        self.e = as_vector(e, oracle.dim)
        self.coord = coord

    @classmethod
    def along_coordinate(cls, oracle: OrderOracle, x, i: int) -> "LineOracle":
        e = np.zeros(oracle.dim)
        e[i] = 1.0
        return cls(oracle, x, e, coord=i)

    def point_at(self, eta: float) -> np.ndarray:
        if self.coord is not None:
            p = self.x.copy()
            p[self.coord] += eta
            return p
        return self.x + eta * self.e

    def compare_at(self, eta1: float, eta2: float) -> Sign3:
        return self.oracle.compare(self.point_at(eta1), self.point_at(eta2))


@dataclass
class BracketResult:
    a: float
    b: float
    comparisons: int
    status: str


@dataclass
class LineSearchResult:
    eta_hat: float
    bracket: tuple[float, float]
    comparisons: int
    status: str


def bracket_minimum(lo: LineOracle, r0: float = 1.0,
                    max_doublings: int = 60) -> BracketResult:
    """Symmetric interval [-r, r] whose boundaries do not beat their midpoints.

    Doubles r while a boundary point compares strictly better than the
    interior point r/2 on its side; for a coercive unimodal slice the
    returned interval contains the slice minimizer. A monotone slice
    (or pathological noise) exhausts max_doublings and is reported as
    ``hit-max-expansion``.
    """
    if r0 <= 0:
        raise ValueError("initial radius must be positive")
    r = float(r0)
    used = 0
    for _ in range(max_doublings + 1):
        left_better = lo.compare_at(-r, -r / 2.0) == -1
        right_better = lo.compare_at(r, r / 2.0) == -1
        used += 2
        if not left_better and not right_better:
            return BracketResult(-r, r, used, CONVERGED)
        r *= 2.0
    return BracketResult(-r, r, used, HIT_MAX_EXPANSION)


def golden_ratio_search(lo: LineOracle, interval: tuple[float, float],
                        tol: float = 1e-8) -> LineSearchResult:
    """Golden-ratio bracket shrinking driven by one compare per iteration.

    Probes y = a + (1-rho)(b-a) and z = a + rho(b-a); a compare of -1
    (left probe better) shrinks to [a, z], anything else to [y, b]. Stops
    once b - a <= tol and returns the midpoint.
    """
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError(f"invalid interval [{a}, {b}]")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    y = a + (1.0 - RHO) * (b - a)
    z = a + RHO * (b - a)
    used = 0
    while b - a > tol:
        if lo.compare_at(y, z) == -1:
            b = z
            z = y
            y = a + (1.0 - RHO) * (b - a)
        else:
            a = y
            y = z
            z = a + RHO * (b - a)
        used += 1
    return LineSearchResult((a + b) / 2.0, (a, b), used, CONVERGED)


def grm_comparison_count(length: float, tol: float) -> int:
    """Comparisons the golden-ratio loop makes on an interval of given length."""
    if length <= tol:
        return 0
    return math.ceil(math.log(length / tol) / math.log(PHI))


def line_minimize(lo: LineOracle, tol: float = 1e-8, r0: float = 1.0,
                  max_doublings: int = 60, guard: bool = True,
                  segment: tuple[float, float] | None = None) -> LineSearchResult:
    """Bracket (or use a fixed segment), golden-ratio search, then guard.

    The guard spends one extra compare to accept eta_hat only when the
    candidate point is not worse than the base point; otherwise eta_hat
    is zeroed. This makes callers monotone by construction: under noise
    bounded by Delta the accepted point satisfies
    f(x + eta_hat e) <= f(x) + 2 Delta.
    """
    if segment is not None:
        bracket = BracketResult(float(segment[0]), float(segment[1]), 0, CONVERGED)
    else:
        bracket = bracket_minimum(lo, r0=r0, max_doublings=max_doublings)
        if bracket.status == HIT_MAX_EXPANSION:
            return LineSearchResult(0.0, (bracket.a, bracket.b),
                                    bracket.comparisons, HIT_MAX_EXPANSION)
    res = golden_ratio_search(lo, (bracket.a, bracket.b), tol)
    used = bracket.comparisons + res.comparisons
    eta = res.eta_hat
    if guard:
        if lo.compare_at(eta, 0.0) > 0:
            eta = 0.0
        used += 1
    return LineSearchResult(eta, res.bracket, used, CONVERGED)
