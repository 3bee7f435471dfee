"""Grid experiments: sample, order, score, one CSV row per run."""
from dataclasses import dataclass
import csv
import math
import time

import numpy as np

from .alphascan import pick_alpha, scan_alpha
from .graph import Graph
from .graphon import graphon_from_dict, sample_graph
from .metrics import ordering_error
from .refine import iterative_estimate
from .sketch import BudgetExhaustedError, desk_default_params, main_estimate, paper_default_params

PIPELINES = ("sketch-only", "full-iterative")
COLUMNS = ("graphon", "n", "seed", "pipeline", "alpha", "error_D", "error_over_sqrt_n",
           "error_over_n_eps", "wall_ms", "status")
DEFAULT_ALPHA_GRID = tuple(round(a, 3) for a in np.arange(0.02, 0.301, 0.01))

_KEYS = {"graphon", "n_list", "seeds", "alpha", "alpha_grid", "pipeline", "epsilon",
         "params", "paper_params", "out"}
_PARAM_KEYS = {"m", "t", "zeta", "max_attempts"}


@dataclass
class ExperimentConfig:
    graphon: object
    n_list: list
    seeds: list
    alpha: object = "scan"  # a float, or "scan"
    alpha_grid: tuple = DEFAULT_ALPHA_GRID
    pipelines: tuple = ("sketch-only",)
    epsilon: float = 0.45
    params: dict = None
    paper_params: bool = False
    out: str = None

    def __post_init__(self):
        if not self.n_list:
            raise ValueError("n_list must not be empty")
        if not self.seeds:
            raise ValueError("seeds must not be empty")
        if any(int(n) < 3 for n in self.n_list):
            raise ValueError("every n must be at least 3")
        for p in self.pipelines:
            if p not in PIPELINES:
                raise ValueError(f"unknown pipeline {p!r}; choose from {PIPELINES}")
        if self.alpha != "scan":
            self.alpha = float(self.alpha)
            if not 0.0 < self.alpha < 1.0:
                raise ValueError("alpha must lie in (0, 1) or be 'scan'")
        if "full-iterative" in self.pipelines and not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 0.5)")
        extra = set(self.params or {}) - _PARAM_KEYS
        if extra:
            raise ValueError(f"unknown params keys {sorted(extra)}")

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ValueError("experiment config must be a JSON object")
        extra = set(data) - _KEYS
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        missing = {"graphon", "n_list", "seeds"} - set(data)
        if missing:
            raise ValueError(f"missing config keys {sorted(missing)}")
        pipelines = data.get("pipeline", "sketch-only")
        if isinstance(pipelines, str):
            pipelines = [pipelines]
        return cls(
            graphon=graphon_from_dict(data["graphon"]),
            n_list=[int(n) for n in data["n_list"]],
            seeds=[int(s) for s in data["seeds"]],
            alpha=data.get("alpha", "scan"),
            alpha_grid=tuple(float(a) for a in data.get("alpha_grid", DEFAULT_ALPHA_GRID)),
            pipelines=tuple(pipelines),
            epsilon=float(data.get("epsilon", 0.45)),
            params=dict(data.get("params") or {}),
            paper_params=bool(data.get("paper_params", False)),
            out=data.get("out"),
        )


def sketch_params_for(n, overrides=None, asymptotic=False):
    base = paper_default_params(n) if asymptotic else desk_default_params(n)
    overrides = dict(overrides or {})
    if "t" in overrides and "max_attempts" not in overrides:
        overrides["max_attempts"] = 20 * int(overrides["t"])
    return base.with_overrides(**overrides)


def run_cell(config, n, seed, pipeline, n_jobs=1):
    """One experiment row; failures are reported in ``status``."""
    row = {"graphon": config.graphon.tag, "n": n, "seed": seed, "pipeline": pipeline,
           "alpha": "", "error_D": "", "error_over_sqrt_n": "", "error_over_n_eps": "",
           "wall_ms": "", "status": "ok"}
    start = time.perf_counter()
    try:
        sample = sample_graph(config.graphon, n, seed)
        g = Graph(sample.adjacency)
        alpha = config.alpha
        if alpha == "scan":
            alpha = pick_alpha(scan_alpha(g, config.alpha_grid, seed=seed))
            if alpha is None:
                row["status"] = "no-alpha"
                return row
        row["alpha"] = alpha
        if pipeline == "sketch-only":
            params = sketch_params_for(n, config.params, config.paper_params)
            ranks = main_estimate(g, alpha, params, seed=seed, n_jobs=n_jobs)
        else:
            rule = "asymptotic" if config.paper_params else "desk"
            ranks = iterative_estimate(g, alpha, config.epsilon, seed=seed, rule=rule, n_jobs=n_jobs)
        err = ordering_error(ranks, sample.latents).error_D
        row["error_D"] = err
        row["error_over_sqrt_n"] = err / math.sqrt(n)
        row["error_over_n_eps"] = err / n ** config.epsilon
    except BudgetExhaustedError:
        row["status"] = "budget-exhausted"
    except ValueError as exc:
        row["status"] = f"error: {exc}"
    finally:
        row["wall_ms"] = round(1000 * (time.perf_counter() - start))
    return row


def run_experiment(config, sink, n_jobs=1):
    """Write the CSV for every ``(n, seed, pipeline)`` cell to the file object ``sink``."""
    writer = csv.DictWriter(sink, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    rows = []
    for n in config.n_list:
        for seed in config.seeds:
            for pipeline in config.pipelines:
                row = run_cell(config, n, seed, pipeline, n_jobs)
                writer.writerow(row)
                sink.flush()
                rows.append(row)
    return rows
