"""Experiment runner and CLI: sweeps, CSV traces, and summary statistics.

A sweep is the cross product of (solver, seed, delta) cells over one
problem instance. Cells are independent, may run on a process pool, and
are merged by cell key so identical configs produce byte-identical CSVs.
Trace files use the fixed header ``solver,seed,delta,iteration,
oracle_calls,f_gap`` with rows sorted by (solver, seed, iteration).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baselines
from .oracle import NoiseModel
from .problems import QuadraticProblem, as_order_oracle, make_quadratic
from .solvers import SolverConfig, SolverTrace, order_acdm, order_rcd

TRACE_HEADER = "solver,seed,delta,iteration,oracle_calls,f_gap"

SOLVER_KINDS = ("order_rcd", "order_acdm", "gd", "rcd", "acdm")


@dataclass
class SolverSpec:
    """One solver column of a sweep: a kind plus its configuration."""

    name: str
    kind: str
    alpha: float = 0.0
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SOLVER_KINDS:
            raise ValueError(f"unknown solver kind {self.kind!r}; "
                             f"expected one of {SOLVER_KINDS}")


@dataclass
class ExperimentConfig:
    problem: dict
    solvers: list[SolverSpec]
    seeds: list[int]
    deltas: list[float]
    max_iterations: int = 1000
    record_every: int = 1
    x0_scale: float = 0.0

    def __post_init__(self):
        if not self.solvers:
            raise ValueError("need at least one solver")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if not self.deltas:
            self.deltas = [0.0]
        names = [s.name for s in self.solvers]
        if len(set(names)) != len(names):
            raise ValueError("solver names must be unique")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        data = json.loads(text)
        solvers = [SolverSpec(**s) for s in data.pop("solvers")]
        return cls(solvers=solvers, **data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_json(Path(path).read_text())


def build_problem(desc: dict) -> QuadraticProblem:
    """Instantiate the problem named by a config's ``problem`` block."""
    d = desc["d"]
    spec = desc.get("spectrum", {"kind": "loguniform", "lo": 1.0, "hi": 1e3})
    if isinstance(spec, dict):
        spectrum = np.geomspace(spec["lo"], spec["hi"], d)
    else:
        spectrum = np.asarray(spec, dtype=float)
    return make_quadratic(d, spectrum,
                          rotation_seed=desc.get("rotation_seed", 0),
                          b_scale=desc.get("b_scale", 1.0),
                          rotation=desc.get("rotation", 1.0))


def _run_cell(cfg: ExperimentConfig, spec: SolverSpec, seed: int,
              delta: float) -> tuple[str, int, float, SolverTrace]:
    problem = build_problem(cfg.problem)
    x0 = np.full(problem.dim, cfg.x0_scale)
    opts = dict(spec.options)
    mu = opts.pop("mu", None)
    solver_cfg = SolverConfig(max_iterations=cfg.max_iterations, seed=seed,
                              mu=mu if mu is not None else
                              (problem.mu_alpha(spec.alpha)
                               if spec.kind in ("order_acdm", "acdm") else 0.0),
                              **opts)
    noise = NoiseModel.bounded(delta) if delta > 0 else NoiseModel.none()
    gap = problem.suboptimality
    if spec.kind == "order_rcd":
        oracle = as_order_oracle(problem, noise)
        trace = order_rcd(oracle, problem.smoothness(spec.alpha), x0,
                          solver_cfg, gap_fn=gap, record_every=cfg.record_every)
    elif spec.kind == "order_acdm":
        oracle = as_order_oracle(problem, noise)
        trace = order_acdm(oracle, problem.smoothness(spec.alpha), x0,
                           solver_cfg, gap_fn=gap, record_every=cfg.record_every)
    elif spec.kind == "gd":
        trace = baselines.gradient_descent(problem, x0, cfg.max_iterations,
                                           record_every=cfg.record_every)
    elif spec.kind == "rcd":
        trace = baselines.rcd_first_order(problem, x0, solver_cfg,
                                          record_every=cfg.record_every)
    else:
        trace = baselines.acdm_first_order(problem, x0, solver_cfg,
                                           alpha=spec.alpha,
                                           record_every=cfg.record_every)
    return spec.name, seed, delta, trace


def _format_gap(v: float) -> str:
    return "nan" if math.isnan(v) else format(v, ".12g")


def run_experiment(cfg: ExperimentConfig, out_dir, jobs: int = 1) -> list[Path]:
    """Execute every (solver, seed, delta) cell and write one CSV per cell group.

    Returns the written trace files (one per (solver, delta), all seeds
    inside, rows sorted by (solver, seed, iteration)). Cell failures are
    recorded in ``failures.json`` without aborting the sweep.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = [(spec, seed, delta) for spec in cfg.solvers
             for delta in cfg.deltas for seed in cfg.seeds]
    results: dict[tuple[str, float], list[tuple[int, SolverTrace]]] = {}
    failures: list[dict] = []

    def consume(spec, seed, delta, outcome, err=None):
        if err is not None:
            failures.append({"solver": spec.name, "seed": seed,
                             "delta": delta, "error": str(err)})
            return
        name, seed, delta, trace = outcome
        results.setdefault((name, delta), []).append((seed, trace))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [(spec, seed, delta,
                        pool.submit(_run_cell, cfg, spec, seed, delta))
                       for spec, seed, delta in cells]
            for spec, seed, delta, fut in futures:
                try:
                    consume(spec, seed, delta, fut.result())
                except Exception as e:  # cell failure, sweep continues
                    consume(spec, seed, delta, None, err=e)
    else:
        for spec, seed, delta in cells:
            try:
                consume(spec, seed, delta, _run_cell(cfg, spec, seed, delta))
            except Exception as e:
                consume(spec, seed, delta, None, err=e)

    paths = []
    for spec in cfg.solvers:
        for delta in cfg.deltas:
            group = results.get((spec.name, delta))
            if not group:
                continue
            group.sort(key=lambda t: t[0])
            path = out / f"trace_{spec.name}_delta{delta:g}.csv"
            with path.open("w", newline="\n") as fh:
                fh.write(TRACE_HEADER + "\n")
                for seed, trace in group:
                    for k, calls, gap in trace.rows():
                        fh.write(f"{spec.name},{seed},{delta:g},{k},"
                                 f"{calls},{_format_gap(gap)}\n")
            paths.append(path)
    if failures:
        (out / "failures.json").write_text(json.dumps(failures, indent=2))
    return paths


def load_traces(trace_dir) -> dict[tuple[str, int, float], np.ndarray]:
    """Read every trace CSV in a directory into (solver, seed, delta) runs.

    Each run is a structured array with iteration, oracle_calls, f_gap.
    """
    runs: dict[tuple[str, int, float], list[tuple[int, int, float]]] = {}
    files = sorted(Path(trace_dir).glob("trace_*.csv"))
    if not files:
        raise FileNotFoundError(f"no trace CSVs under {trace_dir}")
    for path in files:
        with path.open() as fh:
            header = fh.readline().strip()
            if header != TRACE_HEADER:
                raise ValueError(f"{path}: unexpected header {header!r}")
            for line in fh:
                solver, seed, delta, it, calls, gap = line.rstrip("\n").split(",")
                key = (solver, int(seed), float(delta))
                runs.setdefault(key, []).append((int(it), int(calls), float(gap)))
    out = {}
    for key, rows in runs.items():
        arr = np.array(rows, dtype=[("iteration", np.int64),
                                    ("oracle_calls", np.int64),
                                    ("f_gap", np.float64)])
        arr.sort(order="iteration")
        out[key] = arr
    return out


def deviation_probability(traces: dict, eps: float, sigma: float,
                          solver: str | None = None) -> tuple[float, float]:
    """Fraction of runs whose terminal gap is >= eps, with the stated bound.

    The bound sigma comes from running each seed for the iteration
    budget that brings the expected gap below eps * sigma; by Markov's
    inequality the deviation probability is then at most sigma.
    """
    keys = [k for k in traces if solver is None or k[0] == solver]
    if len(keys) < 30:
        raise ValueError(f"need at least 30 runs, have {len(keys)}")
    budgets = {traces[k]["iteration"][-1] for k in keys}
    if len(budgets) != 1:
        raise ValueError("runs end at different iteration budgets")
    terminal = np.array([traces[k]["f_gap"][-1] for k in keys])
    return float(np.mean(terminal >= eps)), sigma


def summarize_oracle_complexity(traces: dict, eps_targets: list[float]) -> dict:
    """Median oracle calls to first reach each target gap, per solver.

    Only seeds that reach the target contribute; a solver that never
    reaches a target gets None (a blank cell).
    """
    per_solver: dict[str, list] = {}
    for (solver, seed, delta), arr in traces.items():
        per_solver.setdefault(solver, []).append(arr)
    table: dict[str, dict[float, float | None]] = {}
    for solver, arrs in sorted(per_solver.items()):
        row = {}
        for eps in eps_targets:
            firsts = []
            for arr in arrs:
                hit = np.nonzero(arr["f_gap"] <= eps)[0]
                if hit.size:
                    firsts.append(arr["oracle_calls"][hit[0]])
            row[eps] = float(np.median(firsts)) if firsts else None
        table[solver] = row
    return table


def _format_summary(table: dict, eps_targets: list[float]) -> str:
    width = max(len(s) for s in table) + 2
    head = "solver".ljust(width) + "".join(f"eps={e:g}".rjust(16) for e in eps_targets)
    lines = [head]
    for solver, row in table.items():
        cells = "".join(
            (f"{row[e]:.0f}".rjust(16) if row[e] is not None else "-".rjust(16))
            for e in eps_targets)
        lines.append(solver.ljust(width) + cells)
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="orderopt-bench",
                                     description="comparison-oracle benchmark runner")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a sweep from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--jobs", type=int, default=1)

    p_sum = sub.add_parser("summarize", help="oracle calls to reach targets")
    p_sum.add_argument("--traces", required=True)
    p_sum.add_argument("--eps", required=True,
                       help="comma-separated gap targets, e.g. 1e-4,1e-6")

    p_dev = sub.add_parser("deviation", help="empirical deviation fraction")
    p_dev.add_argument("--traces", required=True)
    p_dev.add_argument("--eps", type=float, required=True)
    p_dev.add_argument("--sigma", type=float, required=True)
    p_dev.add_argument("--solver", default=None)

    args = parser.parse_args(argv)
    if args.command == "run":
        cfg = ExperimentConfig.load(args.config)
        run_experiment(cfg, args.out, jobs=args.jobs)
        out = Path(args.out)
        if (out / "failures.json").exists():
            print(f"some cells failed; see {out / 'failures.json'}",
                  file=sys.stderr)
            return 1
        print(f"traces written to {out}")
        return 0
    if args.command == "summarize":
        targets = [float(v) for v in args.eps.split(",")]
        table = summarize_oracle_complexity(load_traces(args.traces), targets)
        print(_format_summary(table, targets))
        return 0
    frac, sigma = deviation_probability(load_traces(args.traces),
                                        args.eps, args.sigma,
                                        solver=args.solver)
    print(f"empirical deviation fraction {frac:.4f} (Markov bound {sigma})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
