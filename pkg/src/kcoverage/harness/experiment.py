"""Batch runs over (scheduler, seed) pairs and the canned grid comparison."""
from __future__ import annotations

import csv
import dataclasses
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..engine import SimulationConfig, Simulator
from ..errors import ConfigurationError
from ..metrics import k_lifetime
from ..topology import GridTopology
from .svg import plot_traces
from .traces import trace_header, write_message_log, write_trace_csv

OUTPUT_ENV = "KCOVERAGE_OUTPUT_DIR"


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "kcoverage-out"))


def parse_scheduler(label: str) -> dict:
    """``cgs``, ``centralized``, ``always_on`` or ``random:<p_sleep>``."""
    name, _, arg = label.strip().partition(":")
    if name == "random":
        if not arg:
            raise ConfigurationError("random scheduler needs a sleep probability, e.g. random:0.4")
        try:
            return {"scheduler": "random", "p_sleep": float(arg)}
        except ValueError:
            raise ConfigurationError(f"bad sleep probability in {label!r}") from None
    if arg:
        raise ConfigurationError(f"scheduler {name!r} takes no argument")
    return {"scheduler": name}


def scheduler_slug(label: str) -> str:
    return label.strip().replace(":", "_p")


@dataclass(frozen=True)
class ExperimentSpec:
    base: SimulationConfig
    schedulers: tuple
    seeds: tuple
    output_dir: Path = field(default_factory=default_output_dir)
    lambdas: tuple = (0.99, 0.9)
    message_logs: bool = False

    def validate(self):
        if not self.schedulers or not self.seeds:
            raise ConfigurationError("an experiment needs at least one scheduler and one seed")
        for cfg in self.configs():
            cfg.validate()

    def config_for(self, label: str, seed: int) -> SimulationConfig:
        return dataclasses.replace(self.base, seed=seed, **parse_scheduler(label))

    def configs(self):
        return [self.config_for(label, seed) for label in self.schedulers for seed in self.seeds]


def figure5_config(**overrides) -> SimulationConfig:
    """10x10 grid, 10 m spacing, 15 m sensing, 40 m radio, 20 energy units, k=3, alpha=2."""
    params = dict(topology=GridTopology(10, 10, 10.0), k=3, alpha=2.0, sensing_radius_m=15.0,
                  comm_radius_m=40.0, initial_energy=20.0, awake_cost_per_period=1.0, max_periods=60)
    params.update(overrides)
    return SimulationConfig(**params)


FIGURE5_SCHEDULERS = ("cgs", "random:0.4", "random:0.25")


def figure5_spec(seeds=(1,), output_dir=None, **overrides) -> ExperimentSpec:
    return ExperimentSpec(figure5_config(**overrides), FIGURE5_SCHEDULERS, tuple(seeds),
                          Path(output_dir) if output_dir else default_output_dir())


def _run_one(args):
    cfg, label = args
    sim = Simulator(cfg)
    trace = sim.run()
    return label, cfg.seed, trace, sim.message_log


def _fmt(v) -> str:
    return f"{v:.6f}"


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> dict:
    """Run every (scheduler, seed) pair and write trace CSVs plus summaries.

    Returns ``{"traces": {(label, seed): path}, "summary": path, "lifetimes": path}``.
    """
    spec.validate()
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(spec.config_for(label, seed), label) for label in spec.schedulers for seed in spec.seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]

    paths = {}
    traces = {}
    for label, seed, trace, messages in results:
        slug = scheduler_slug(label)
        paths[(label, seed)] = write_trace_csv(trace, out / f"{slug}_seed{seed}.csv")
        if spec.message_logs and messages:
            write_message_log(messages, out / f"{slug}_seed{seed}_messages.csv")
        traces[(label, seed)] = trace

    levels = spec.base.levels
    header = ["scheduler"] + trace_header(levels)
    summary = out / "summary.csv"
    with open(summary, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for label in spec.schedulers:
            group = [traces[(label, s)] for s in spec.seeds]
            for i in range(spec.base.max_periods):
                rows = [t.rows[i] for t in group]
                w.writerow([label, rows[0].period,
                            _fmt(np.mean([r.alive for r in rows])),
                            _fmt(np.mean([r.awake for r in rows]))]
                           + [_fmt(np.mean([r.theta[k] for r in rows])) for k in range(levels)]
                           + [_fmt(np.mean([r.theta_prime[k] for r in rows])) for k in range(levels)]
                           + [_fmt(np.mean([r.messages for r in rows]))])

    lifetimes = out / "lifetimes.csv"
    with open(lifetimes, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scheduler", "seed", "k", "lambda", "k_lifetime", "network_lifetime"])
        for label in spec.schedulers:
            for seed in spec.seeds:
                tr = traces[(label, seed)]
                for k in range(1, levels + 1):
                    for lam in spec.lambdas:
                        life = k_lifetime(tr, k, lam) if tr.rows else 0
                        w.writerow([label, seed, k, lam, life, tr.network_lifetime()])
    return {"traces": paths, "summary": summary, "lifetimes": lifetimes}


def run_figure5(seeds=(1,), output_dir=None, workers: int = 1, **overrides) -> dict:
    """The grid comparison: CGS against random sleeping with p=0.4 and p=0.25,
    plus the coverage (per scheduler) and awake-count charts for the first seed."""
    spec = figure5_spec(seeds, output_dir, **overrides)
    result = run_experiment(spec, workers)
    first = spec.seeds[0]
    csvs = [result["traces"][(label, first)] for label in spec.schedulers]
    titles = ["CGS", "random p_sleep=0.4", "random p_sleep=0.25"]
    out = Path(spec.output_dir)
    result["figure5"] = plot_traces(csvs, ["theta_p1", "theta_p2", "theta_p3"], out / "figure5.svg",
                                    layout="panels", titles=titles)
    result["figure6"] = plot_traces(csvs, ["awake"], out / "figure6.svg", layout="overlay", titles=titles)
    return result
