"""Optimization with pairwise order comparisons only.

Solvers never see objective values: every decision is driven by the sign
of a (possibly noisy) difference of two evaluations. The package bundles
the solvers, white-box benchmark problems, an experiment runner with a
CLI, and an HTTP session service that lets a human answer the
comparisons live.
"""

from .core import (CoordinateSmoothness, Rng, as_vector, make_rng,
                   sample_coordinate, sample_unit_sphere,
                   sample_unit_sphere_batch, spawn_rngs)
from .linesearch import (PHI, RHO, BracketResult, LineOracle,
                         LineSearchResult, bracket_minimum,
                         golden_ratio_search, grm_comparison_count,
                         line_minimize)
from .oracle import (NoiseModel, OrderOracle, Sign3, StochasticOrderOracle,
                     sign3)
from .problems import (QuadraticProblem, StochasticQuadratic, as_order_oracle,
                       default_benchmark_problem, log_uniform_spectrum,
                       make_quadratic)
from .solvers import (AcdmCoefficients, SolverConfig, SolverTrace, Square2D,
                      SquareHalvingResult, acdm_coefficients, order_acdm,
                      order_rcd, square_halving_2d, stochastic_order_sgd,
                      stochastic_order_step)

__version__ = "0.1.0"

__all__ = [
    "CoordinateSmoothness", "Rng", "as_vector", "make_rng",
    "sample_coordinate", "sample_unit_sphere", "sample_unit_sphere_batch",
    "spawn_rngs",
    "PHI", "RHO", "BracketResult", "LineOracle", "LineSearchResult",
    "bracket_minimum", "golden_ratio_search", "grm_comparison_count",
    "line_minimize",
    "NoiseModel", "OrderOracle", "Sign3", "StochasticOrderOracle", "sign3",
    "QuadraticProblem", "StochasticQuadratic", "as_order_oracle",
    "default_benchmark_problem", "log_uniform_spectrum", "make_quadratic",
    "AcdmCoefficients", "SolverConfig", "SolverTrace", "Square2D",
    "SquareHalvingResult", "acdm_coefficients", "order_acdm", "order_rcd",
    "square_halving_2d", "stochastic_order_sgd", "stochastic_order_step",
]
