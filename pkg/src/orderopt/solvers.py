"""The comparison-driven optimization procedures.

Four methods, all consuming only ternary order queries: random coordinate
descent with golden-ratio line search, its Nesterov-style accelerated
variant, a normalized-SGD-like method for the stochastic oracle, and the
two-dimensional square-halving scheme. Each run records a trace of
(iteration, oracle calls, optional white-box gap) rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Callable

import numpy as np

from .core import CoordinateSmoothness, as_vector, make_rng, sample_unit_sphere
from .linesearch import (CONVERGED, HIT_MAX_EXPANSION, LineOracle,
                         golden_ratio_search, line_minimize)
from .oracle import OrderOracle, Sign3, StochasticOrderOracle

COMPLETED = "completed"
WARM_RADIUS_FLOOR = 1e-8

GapFn = Callable[[np.ndarray], float]


@dataclass
class SolverConfig:
    """Knobs shared by the solvers; irrelevant fields are ignored per method.

    mu is the strong-convexity modulus in the sampling-weighted geometry
    and is required (positive) by the accelerated method only. bounds,
    when set, replaces bracket doubling with golden-ratio search on the
    per-coordinate segment carved from the box.
    """

    max_iterations: int = 1000
    ls_tol: float = 1e-8
    r0: float = 1.0
    max_doublings: int = 60
    mu: float = 0.0
    acdm_second_search: bool = False
    eta: float = 1.0
    gamma: float = 1e-3
    gamma_schedule: str = "fixed"  # "white-box" | "fixed" | "decaying"
    seed: int = 0
    bounds: list[tuple[float, float]] | None = None

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")
        for name in ("ls_tol", "r0", "eta"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.gamma_schedule not in ("white-box", "fixed", "decaying"):
            raise ValueError(f"unknown gamma schedule {self.gamma_schedule!r}")

    def to_dict(self) -> dict:
        return asdict(self)


class SolverTrace:
    """Per-iteration history of a run: oracle usage and white-box gaps."""

    def __init__(self, seed: int | None = None, keep_iterates: bool = False):
        self.seed = seed
        self.iterations: list[int] = []
        self.oracle_calls: list[int] = []
        self.f_gap: list[float] = []
        self.iterates: list[np.ndarray] | None = [] if keep_iterates else None
        self.status = COMPLETED
        self.x_final: np.ndarray | None = None
        self.extras: dict = {}

    def record(self, k: int, calls: int, x: np.ndarray, gap_fn: GapFn | None):
        self.iterations.append(k)
        self.oracle_calls.append(calls)
        self.f_gap.append(float(gap_fn(x)) if gap_fn is not None else math.nan)
        if self.iterates is not None:
            self.iterates.append(x.copy())

    def finish(self, x: np.ndarray, status: str = COMPLETED):
        self.x_final = x.copy()
        self.status = status

    def rows(self):
        """Iterate (iteration, oracle_calls, f_gap) tuples."""
        return zip(self.iterations, self.oracle_calls, self.f_gap)


def _segment_for(cfg: SolverConfig, x: np.ndarray, i: int):
    if cfg.bounds is None:
        return None
    lo, hi = cfg.bounds[i]
    return (lo - x[i], hi - x[i])


def order_rcd(oracle: OrderOracle, s: CoordinateSmoothness, x0,
              cfg: SolverConfig, gap_fn: GapFn | None = None,
              keep_iterates: bool = False, record_every: int = 1,
              trace_out: SolverTrace | None = None) -> SolverTrace:
    """Random coordinate descent driven entirely by order comparisons.

    Per iteration: sample a coordinate from p_alpha, bracket and run the
    golden-ratio search along it, guard the step against the current
    point, and move. Fully adaptive: the L_i enter only through the
    sampling distribution (and not at all when alpha = 0). Passing
    trace_out keeps the partial history reachable when the oracle
    suspends mid-iteration (the live-session case).
    """
    x = as_vector(x0, oracle.dim).copy()
    rng = make_rng(cfg.seed)
    warm = np.full(x.size, cfg.r0)
    trace = trace_out if trace_out is not None \
        else SolverTrace(seed=cfg.seed, keep_iterates=keep_iterates)
    trace.record(0, oracle.calls, x, gap_fn)
    for k in range(cfg.max_iterations):
        i = s.sample(rng)
        lo = LineOracle.along_coordinate(oracle, x, i)
        res = line_minimize(lo, tol=cfg.ls_tol, r0=warm[i],
                            max_doublings=cfg.max_doublings,
                            segment=_segment_for(cfg, x, i))
        if res.status == HIT_MAX_EXPANSION:
            trace.record(k + 1, oracle.calls, x, gap_fn)
            trace.finish(x, HIT_MAX_EXPANSION)
            return trace
        if res.eta_hat != 0.0:
            x[i] += res.eta_hat
            warm[i] = max(abs(res.eta_hat), WARM_RADIUS_FLOOR)
        if (k + 1) % record_every == 0 or k + 1 == cfg.max_iterations:
            trace.record(k + 1, oracle.calls, x, gap_fn)
    trace.finish(x)
    return trace


@dataclass(frozen=True)
class AcdmCoefficients:
    a: float
    A_next: float
    B_next: float
    alpha_k: float
    beta_k: float


def acdm_coefficients(A_k: float, B_k: float, S_beta: float,
                      mu: float) -> AcdmCoefficients:
    """Advance the estimate-sequence coefficients one step.

    a is the positive root of a^2 S_beta^2 = (A_k + a)(B_k + mu a), i.e.
    of (S_beta^2 - mu) a^2 - (B_k + mu A_k) a - A_k B_k = 0. Requires
    mu < S_beta^2; at mu = S_beta^2 the equation degenerates to linear
    with no positive root. The defining identity is re-verified to 1e-10
    relative before returning.
    """
    if A_k < 0 or B_k < 1:
        raise ValueError("need A_k >= 0 and B_k >= 1")
    if S_beta <= 0 or mu < 0:
        raise ValueError("need S_beta > 0 and mu >= 0")
    q = S_beta * S_beta - mu
    if q <= 0:
        raise ValueError(
            f"no positive root: mu = {mu} >= S_beta^2 = {S_beta**2}; "
            "the modulus and coordinate constants are inconsistent")
    lin = B_k + mu * A_k
    a = (lin + math.sqrt(lin * lin + 4.0 * q * A_k * B_k)) / (2.0 * q)
    A_next = A_k + a
    B_next = B_k + mu * a
    lhs = a * a * S_beta * S_beta
    rhs = A_next * B_next
    if abs(lhs - rhs) > 1e-10 * max(abs(lhs), abs(rhs)):
        raise ArithmeticError("coefficient identity failed to verify")
    return AcdmCoefficients(a, A_next, B_next, a / A_next,
                            mu * a / B_next)


def order_acdm(oracle: OrderOracle, s: CoordinateSmoothness, x0,
               cfg: SolverConfig, gap_fn: GapFn | None = None,
               keep_iterates: bool = False, record_every: int = 1,
               trace_out: SolverTrace | None = None) -> SolverTrace:
    """Accelerated coordinate descent with order-comparison line searches.

    Coordinates are sampled with exponent beta = alpha / 2. Each
    iteration advances the estimate-sequence coefficients, forms the
    convex-combination point y_k, takes a guarded golden-ratio step from
    it, then updates the momentum point; the second line search (the
    zeta step from w_k) is off by default and restored by
    cfg.acdm_second_search.
    """
    if cfg.mu <= 0:
        raise ValueError("the accelerated method requires a positive modulus mu")
    beta = s.alpha / 2.0
    sb = CoordinateSmoothness(s.L, beta)
    S_beta = sb.s_alpha()
    p_beta = sb.distribution()
    L_pow_alpha = s.L**s.alpha
    rng = make_rng(cfg.seed)
    x = as_vector(x0, oracle.dim).copy()
    z = x.copy()
    A_k, B_k = 0.0, 1.0
    log_scale = 0.0  # the recurrence is homogeneous; renormalize to avoid overflow
    warm = np.full(x.size, cfg.r0)
    identity_err = 0.0
    trace = trace_out if trace_out is not None \
        else SolverTrace(seed=cfg.seed, keep_iterates=keep_iterates)
    trace.record(0, oracle.calls, x, gap_fn)
    for k in range(cfg.max_iterations):
        i = sb.sample(rng)
        coef = acdm_coefficients(A_k, B_k, S_beta, cfg.mu)
        lhs = coef.a**2 * S_beta**2
        rhs = coef.A_next * coef.B_next
        identity_err = max(identity_err, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
        y = ((1.0 - coef.alpha_k) * x + coef.alpha_k * (1.0 - coef.beta_k) * z) \
            / (1.0 - coef.alpha_k * coef.beta_k)
        lo = LineOracle.along_coordinate(oracle, y, i)
        res = line_minimize(lo, tol=cfg.ls_tol, r0=warm[i],
                            max_doublings=cfg.max_doublings,
                            segment=_segment_for(cfg, y, i))
        if res.status == HIT_MAX_EXPANSION:
            trace.record(k + 1, oracle.calls, x, gap_fn)
            trace.finish(x, HIT_MAX_EXPANSION)
            return trace
        eta = res.eta_hat
        if eta != 0.0:
            warm[i] = max(abs(eta), WARM_RADIUS_FLOOR)
        x = y.copy()
        x[i] += eta
        w = (1.0 - coef.beta_k) * z + coef.beta_k * y
        w[i] += coef.a * L_pow_alpha[i] / (coef.B_next * p_beta[i]) * eta
        if cfg.bounds is not None:
            np.clip(w, [lo for lo, _ in cfg.bounds],
                    [hi for _, hi in cfg.bounds], out=w)
        if cfg.acdm_second_search and eta != 0.0:
            # local correction only: a window of one step length around the
            # momentum point. An expanding bracket would find the global
            # slice minimizer, which provably cancels the momentum and
            # collapses this method onto plain coordinate descent.
            window = abs(eta)
            seg = _segment_for(cfg, w, i)
            if seg is not None:
                window = min(window, -seg[0], seg[1])
            if window > 0:
                lo2 = LineOracle.along_coordinate(oracle, w, i)
                res2 = golden_ratio_search(lo2, (-window, window), cfg.ls_tol)
                zeta = res2.eta_hat
                if lo2.compare_at(zeta, 0.0) > 0:
                    zeta = 0.0
            else:
                zeta = 0.0
        else:
            zeta = 0.0
        z = w
        z[i] += zeta
        A_k, B_k = coef.A_next, coef.B_next
        if B_k > 1e100:
            log_scale += math.log(B_k)
            A_k /= B_k
            B_k = 1.0
        if (k + 1) % record_every == 0 or k + 1 == cfg.max_iterations:
            trace.record(k + 1, oracle.calls, x, gap_fn)
    trace.finish(x)
    trace.extras.update(A_final=A_k, B_final=B_k, log_scale=log_scale,
                        A_final_log=(math.log(A_k) if A_k > 0 else -math.inf)
                        + log_scale,
                        identity_max_rel_err=identity_err)
    return trace


def stochastic_order_step(x, e, gamma: float, eta: float,
                          o: StochasticOrderOracle,
                          xi=None) -> tuple[np.ndarray, Sign3]:
    """One update x - eta * phi(x + gamma e, x - gamma e) * e.

    Uses a caller-supplied realization when given (so a white-box
    smoothing radius can be computed on the same realization), otherwise
    draws one. A tie (phi = 0) leaves the iterate unchanged.
    """
    x = as_vector(x, o.dim)
    e = as_vector(e, o.dim)
    if gamma < 0 or eta <= 0:
        raise ValueError("need gamma >= 0 and eta > 0")
    if xi is None:
        xi = o.draw_realization()
    s = o.compare_on(x + gamma * e, x - gamma * e, xi)
    if s == 0:
        return x.copy(), s
    return x - eta * s * e, s


def stochastic_order_sgd(o: StochasticOrderOracle, x0, cfg: SolverConfig,
                         grad_fn: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
                         smoothness: float | None = None,
                         gap_fn: GapFn | None = None,
                         record_every: int = 1) -> SolverTrace:
    """Normalized-SGD-style iteration on the stochastic order oracle.

    Directions are fresh uniform sphere samples, steps decay as eta / k.
    The smoothing radius follows cfg.gamma_schedule: "fixed" and
    "decaying" (gamma / sqrt(k)) are comparison-only; "white-box" uses
    ||grad f(x, xi)|| / (sqrt(d) L) on the compare's own realization and
    exists for verification runs only.
    """
    x = as_vector(x0, o.dim).copy()
    if cfg.gamma_schedule == "white-box" and (grad_fn is None or smoothness is None):
        raise ValueError("white-box gamma schedule needs grad_fn and smoothness")
    rng = make_rng(cfg.seed)
    sqrt_d = math.sqrt(o.dim)
    trace = SolverTrace(seed=cfg.seed)
    trace.record(0, o.calls, x, gap_fn)
    for k in range(1, cfg.max_iterations + 1):
        e = sample_unit_sphere(o.dim, rng)
        xi = o.draw_realization()
        if cfg.gamma_schedule == "white-box":
            gamma = float(np.linalg.norm(grad_fn(x, xi))) / (sqrt_d * smoothness)
        elif cfg.gamma_schedule == "fixed":
            gamma = cfg.gamma
        else:
            gamma = cfg.gamma / math.sqrt(k)
        x, _ = stochastic_order_step(x, e, gamma, cfg.eta / k, o, xi=xi)
        if k % record_every == 0 or k == cfg.max_iterations:
            trace.record(k, o.calls, x, gap_fn)
    trace.finish(x)
    return trace


@dataclass(frozen=True)
class Square2D:
    center: tuple[float, float]
    half_side: float

    def __post_init__(self):
        if self.half_side <= 0:
            raise ValueError("half_side must be positive")


@dataclass
class SquareHalvingResult:
    point: np.ndarray
    regions: list[tuple[float, float, float, float]]  # (cx, cy, hw, hh) per round
    rounds: int


def square_halving_2d(oracle: OrderOracle, sq0: Square2D, eps: float,
                      inner_tol: float, lipschitz: float | None = None,
                      rounds: int | None = None,
                      regions_out: list | None = None) -> SquareHalvingResult:
    """Center-line cuts for convex objectives on a 2-D square.

    Each round minimizes along the horizontal center line, discards the
    vertical half the gradient points into (sign of a symmetric probe
    pair across the line), then repeats with the vertical center line;
    one round exactly halves both sides. The discard needs the gradient
    sign only, and a probe tie keeps the lower/left half. Runs
    ceil(log2(lipschitz * side / eps)) rounds unless given explicitly.
    """
    if oracle.dim != 2:
        raise ValueError("square halving is a 2-D method")
    if eps <= 0 or inner_tol <= 0:
        raise ValueError("eps and inner_tol must be positive")
    if rounds is None:
        if lipschitz is None:
            raise ValueError("pass lipschitz (for the round count) or rounds")
        rounds = max(1, math.ceil(math.log2(lipschitz * 2.0 * sq0.half_side / eps)))
    cx, cy = float(sq0.center[0]), float(sq0.center[1])
    hw = hh = float(sq0.half_side)
    regions = regions_out if regions_out is not None else []
    regions.append((cx, cy, hw, hh))
    ex = np.array([1.0, 0.0])
    ey = np.array([0.0, 1.0])
    for _ in range(rounds):
        # horizontal center line: search along x, then cut the y-extent
        lo = LineOracle(oracle, np.array([cx, cy]), ex, coord=0)
        res = golden_ratio_search(lo, (-hw, hw), inner_tol)
        p = np.array([cx + res.eta_hat, cy])
        t = hh * 1e-3
        s = oracle.compare(p + t * ey, p - t * ey)
        hh /= 2.0
        cy = cy + hh if s == -1 else cy - hh  # tie keeps the lower half
        # vertical center line of the remaining rectangle: cut the x-extent
        lo = LineOracle(oracle, np.array([cx, cy]), ey, coord=1)
        res = golden_ratio_search(lo, (-hh, hh), inner_tol)
        p = np.array([cx, cy + res.eta_hat])
        t = hw * 1e-3
        s = oracle.compare(p + t * ex, p - t * ex)
        hw /= 2.0
        cx = cx + hw if s == -1 else cx - hw  # tie keeps the left half
        regions.append((cx, cy, hw, hh))
    return SquareHalvingResult(np.array([cx, cy]), regions, rounds)
