"""First-order reference methods for benchmark comparisons.

These consume white-box gradients (constant steps 1/L and 1/L_i), never
the comparison oracle; their trace cost column counts gradient
evaluations so the rows stay strictly increasing like oracle traces.
"""
from __future__ import annotations

import numpy as np

from .core import CoordinateSmoothness, as_vector, make_rng
from .problems import QuadraticProblem
from .solvers import GapFn, SolverConfig, SolverTrace, acdm_coefficients


def gradient_descent(p: QuadraticProblem, x0, steps: int,
                     step_size: float | None = None,
                     gap_fn: GapFn | None = None,
                     record_every: int = 1) -> SolverTrace:
    """Constant-step full-gradient descent, default step 1/L."""
    x = as_vector(x0, p.dim).copy()
    h = 1.0 / p.smoothness_constant() if step_size is None else step_size
    gap = gap_fn if gap_fn is not None else p.suboptimality
    trace = SolverTrace()
    trace.record(0, 0, x, gap)
    for k in range(1, steps + 1):
        x = x - h * p.grad(x)
        if k % record_every == 0 or k == steps:
            trace.record(k, k, x, gap)
    trace.finish(x)
    return trace


def rcd_first_order(p: QuadraticProblem, x0, cfg: SolverConfig,
                    gap_fn: GapFn | None = None,
                    record_every: int = 1) -> SolverTrace:
    """Random coordinate descent with the exact coordinate step 1/L_i."""
    s = p.smoothness(getattr(cfg, "alpha", 0.0))
    x = as_vector(x0, p.dim).copy()
    rng = make_rng(cfg.seed)
    L = s.L
    gap = gap_fn if gap_fn is not None else p.suboptimality
    trace = SolverTrace(seed=cfg.seed)
    trace.record(0, 0, x, gap)
    for k in range(1, cfg.max_iterations + 1):
        i = s.sample(rng)
        x[i] -= (p.A[i] @ x - p.b[i]) / L[i]
        if k % record_every == 0 or k == cfg.max_iterations:
            trace.record(k, k, x, gap)
    trace.finish(x)
    return trace


def acdm_first_order(p: QuadraticProblem, x0, cfg: SolverConfig,
                     alpha: float = 0.0, gap_fn: GapFn | None = None,
                     record_every: int = 1) -> SolverTrace:
    """Accelerated coordinate descent with gradient coordinates.

    Same estimate-sequence coefficients and beta = alpha/2 sampling as
    the comparison-driven variant, but with the closed-form updates
    x_{k+1} = y_k - (1/L_i) grad_i f(y_k) e_i and the matching momentum
    step, for the figure-style comparisons.
    """
    if cfg.mu <= 0:
        raise ValueError("the accelerated method requires a positive modulus mu")
    sb = p.smoothness(alpha / 2.0)
    S_beta = sb.s_alpha()
    p_beta = sb.distribution()
    L = p.L
    rng = make_rng(cfg.seed)
    x = as_vector(x0, p.dim).copy()
    z = x.copy()
    A_k, B_k = 0.0, 1.0
    gap = gap_fn if gap_fn is not None else p.suboptimality
    trace = SolverTrace(seed=cfg.seed)
    trace.record(0, 0, x, gap)
    for k in range(1, cfg.max_iterations + 1):
        i = sb.sample(rng)
        coef = acdm_coefficients(A_k, B_k, S_beta, cfg.mu)
        y = ((1.0 - coef.alpha_k) * x + coef.alpha_k * (1.0 - coef.beta_k) * z) \
            / (1.0 - coef.alpha_k * coef.beta_k)
        g_i = float(p.A[i] @ y - p.b[i])
        x = y.copy()
        x[i] -= g_i / L[i]
        w = (1.0 - coef.beta_k) * z + coef.beta_k * y
        w[i] -= coef.a / (L[i] ** (1.0 - alpha) * coef.B_next * p_beta[i]) * g_i
        z = w
        A_k, B_k = coef.A_next, coef.B_next
        if k % record_every == 0 or k == cfg.max_iterations:
            trace.record(k, k, x, gap)
    trace.finish(x)
    return trace
