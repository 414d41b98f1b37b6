"""End-to-end optimization runs with reproducible traces.

A run is (benchmark, optimizer, budget, seed) plus optional component
overrides. The master seed is split into four independent streams, one
each for the initial design, the hyperparameter sampler, the candidate
proposal, and the benchmark instance, so changing one component leaves
the other streams untouched. Random-search and simulated-annealing
baselines share the initial-design and benchmark streams with the model
run at the same seed, making paired comparisons meaningful.

Trace files are a CSV of one record per evaluation plus a JSON sidecar
holding the full config. With the default wall clock the seconds column
naturally varies between repeats; inject a deterministic clock to get
byte-identical files.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .acquisition import AcquisitionConfig, next_vertex
from .benchmarks import Benchmark, make_benchmark
from .errors import SearchSpaceExhaustedError
from .graphs import SearchSpace, Vertex
from .inference import PriorConfig, SamplerConfig, SamplerState, fit_surrogate
from .surrogate import Dataset

OPTIMIZERS = ("combo", "random-search", "simulated-annealing")


@dataclass(frozen=True)
class RunConfig:
    benchmark: str
    budget: int
    seed: int
    n_init: int = 20
    optimizer: str = "combo"
    benchmark_config: dict = field(default_factory=dict)
    acquisition: dict = field(default_factory=dict)
    prior: dict = field(default_factory=dict)
    sampler: dict = field(default_factory=dict)
    out: Optional[str] = None
    stop_on_target: Optional[float] = None
    sa_t_init: float = 1.0
    sa_cooling: float = 0.95

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if not 1 <= self.n_init < self.budget:
            raise ValueError("need 1 <= n_init < budget")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(
                f"optimizer must be one of {', '.join(OPTIMIZERS)}")
        if not 0.0 < self.sa_cooling <= 1.0:
            raise ValueError("sa_cooling must lie in (0, 1]")
        if self.sa_t_init <= 0.0:
            raise ValueError("sa_t_init must be positive")

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ValueError(f"unknown RunConfig keys: {', '.join(unknown)}")
        return cls(**raw)


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    vertex: Vertex
    value: float
    best_so_far: float
    seconds: float
    beta_medians: tuple = ()


@dataclass
class Trace:
    records: list
    metadata: dict

    @property
    def best(self) -> float:
        return self.records[-1].best_so_far

    @property
    def curve(self) -> np.ndarray:
        return np.array([r.best_so_far for r in self.records])


def _split_streams(cfg: RunConfig):
    init_ss, sampler_ss, acq_ss, bench_ss = np.random.SeedSequence(cfg.seed).spawn(4)
    bench_config = dict(cfg.benchmark_config)
    if "seed" not in bench_config:
        bench_config["seed"] = int(bench_ss.generate_state(1)[0])
    return (np.random.default_rng(init_ss), np.random.default_rng(sampler_ss),
            np.random.default_rng(acq_ss), bench_config)


def _config_from_dict(cls, overrides: dict):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {', '.join(unknown)}")
    return cls(**overrides)


def _initial_design(space: SearchSpace, rng: np.random.Generator, n: int) -> list:
    """n distinct uniform vertices; falls back to a shuffled enumeration."""
    if n > space.total_size:
        raise ValueError(
            f"n_init={n} exceeds the {space.total_size}-vertex space")
    seen = {}
    attempts = 0
    while len(seen) < n and attempts < 100:
        batch = space.random_vertices(rng, max(2 * n, 64))
        for row in batch:
            seen.setdefault(tuple(int(c) for c in row), None)
            if len(seen) == n:
                break
        attempts += 1
    if len(seen) < n:
        verts = list(space.enumerate_vertices())
        order = rng.permutation(len(verts))
        return [verts[i] for i in order[:n]]
    return list(seen)


class _Recorder:
    def __init__(self, clock: Callable[[], float]):
        self.clock = clock
        self.start = clock()
        self.records = []
        self.best = math.inf

    def add(self, vertex, value: float, beta_medians=()):
        value = float(value)
        self.best = min(self.best, value)
        self.records.append(TraceRecord(
            iteration=len(self.records) + 1,
            vertex=tuple(int(c) for c in vertex),
            value=float(value),
            best_so_far=self.best,
            seconds=self.clock() - self.start,
            beta_medians=tuple(float(b) for b in beta_medians),
        ))

    def reached(self, target: Optional[float]) -> bool:
        return target is not None and self.best <= target


def _finish(cfg: RunConfig, bench: Benchmark, rec: _Recorder,
            stop_reason: str) -> Trace:
    meta = {
        "version": __version__,
        "config": dataclasses.asdict(cfg),
        "benchmark_metadata": bench.metadata,
        "stop_reason": stop_reason,
        "early_stop": stop_reason != "budget",
    }
    trace = Trace(rec.records, meta)
    if cfg.out is not None:
        write_trace(trace, cfg.out)
    return trace


def run_combo(cfg: RunConfig, clock: Callable[[], float] = time.perf_counter) -> Trace:
    init_rng, sampler_rng, acq_rng, bench_config = _split_streams(cfg)
    bench = make_benchmark(cfg.benchmark, bench_config)
    space = bench.space
    priors = _config_from_dict(PriorConfig, cfg.prior)
    sampler_cfg = _config_from_dict(SamplerConfig, cfg.sampler)
    acq_cfg = _config_from_dict(AcquisitionConfig, cfg.acquisition)

    rec = _Recorder(clock)
    data = Dataset((), [])
    for v in _initial_design(space, init_rng, cfg.n_init):
        value = bench.objective(v)
        data = data.append(v, value)
        rec.add(v, value)
    if rec.reached(cfg.stop_on_target):
        return _finish(cfg, bench, rec, "target")

    state = SamplerState.initialize(data, space, priors, seed=sampler_rng)
    stop_reason = "budget"
    while len(rec.records) < cfg.budget:
        samples = fit_surrogate(data, state, priors, space, sampler_cfg)
        try:
            v = next_vertex(data, samples, space, acq_cfg, acq_rng)
        except SearchSpaceExhaustedError:
            stop_reason = "exhausted"
            break
        value = bench.objective(v)
        data = data.append(v, value)
        medians = np.median(np.stack([s.betas for s in samples]), axis=0)
        rec.add(v, value, medians)
        if rec.reached(cfg.stop_on_target):
            stop_reason = "target"
            break
    return _finish(cfg, bench, rec, stop_reason)


def run_random_search(cfg: RunConfig,
                      clock: Callable[[], float] = time.perf_counter) -> Trace:
    init_rng, _, _, bench_config = _split_streams(cfg)
    bench = make_benchmark(cfg.benchmark, bench_config)
    space = bench.space

    rec = _Recorder(clock)
    evaluated = set()
    for v in _initial_design(space, init_rng, cfg.n_init):
        rec.add(v, bench.objective(v))
        evaluated.add(v)
    stop_reason = "budget"
    while len(rec.records) < cfg.budget:
        if rec.reached(cfg.stop_on_target):
            stop_reason = "target"
            break
        if len(evaluated) >= space.total_size:
            stop_reason = "exhausted"
            break
        v = space.random_vertex(init_rng)
        while v in evaluated:
            v = space.random_vertex(init_rng)
        rec.add(v, bench.objective(v))
        evaluated.add(v)
    if rec.reached(cfg.stop_on_target) and stop_reason == "budget":
        stop_reason = "target"
    return _finish(cfg, bench, rec, stop_reason)


def run_simulated_annealing(cfg: RunConfig,
                            clock: Callable[[], float] = time.perf_counter) -> Trace:
    init_rng, _, move_rng, bench_config = _split_streams(cfg)
    bench = make_benchmark(cfg.benchmark, bench_config)
    space = bench.space

    rec = _Recorder(clock)
    current_v, current_y = None, math.inf
    for v in _initial_design(space, init_rng, cfg.n_init):
        value = bench.objective(v)
        rec.add(v, value)
        if value < current_y:
            current_v, current_y = v, value
    temperature = cfg.sa_t_init
    stop_reason = "budget"
    while len(rec.records) < cfg.budget:
        if rec.reached(cfg.stop_on_target):
            stop_reason = "target"
            break
        neighbors = space.neighbors(current_v)
        v = neighbors[int(move_rng.integers(0, len(neighbors)))]
        value = bench.objective(v)
        rec.add(v, value)
        delta = value - current_y
        if delta <= 0.0 or move_rng.random() < math.exp(-delta / temperature):
            current_v, current_y = v, value
        temperature *= cfg.sa_cooling
    if rec.reached(cfg.stop_on_target) and stop_reason == "budget":
        stop_reason = "target"
    return _finish(cfg, bench, rec, stop_reason)


def run(cfg: RunConfig, clock: Callable[[], float] = time.perf_counter) -> Trace:
    runner = {
        "combo": run_combo,
        "random-search": run_random_search,
        "simulated-annealing": run_simulated_annealing,
    }[cfg.optimizer]
    return runner(cfg, clock)


CSV_COLUMNS = ("iteration", "vertex", "value", "best_so_far", "seconds",
               "beta_medians")


def trace_to_csv(trace: Trace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in trace.records:
        writer.writerow([
            r.iteration,
            ";".join(str(c) for c in r.vertex),
            repr(r.value),
            repr(r.best_so_far),
            repr(r.seconds),
            ";".join(repr(b) for b in r.beta_medians),
        ])
    return buf.getvalue()


def write_trace(trace: Trace, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(trace_to_csv(trace))
    with open(_sidecar_path(path), "w", encoding="ascii") as fh:
        json.dump(trace.metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sidecar_path(path: str) -> str:
    base = path[:-4] if path.endswith(".csv") else path
    return base + ".json"


def read_trace(path: str) -> Trace:
    with open(path, "r", encoding="ascii", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"{path}: not a trace file")
    records = []
    for row in rows[1:]:
        it, vertex, value, best, seconds, betas = row
        records.append(TraceRecord(
            iteration=int(it),
            vertex=tuple(int(c) for c in vertex.split(";")),
            value=float(value),
            best_so_far=float(best),
            seconds=float(seconds),
            beta_medians=tuple(float(b) for b in betas.split(";")) if betas else (),
        ))
    try:
        with open(_sidecar_path(path), "r", encoding="ascii") as fh:
            metadata = json.load(fh)
    except FileNotFoundError:
        metadata = {}
    return Trace(records, metadata)


def emit_summary(traces: Sequence[Trace]) -> dict:
    """Final-value statistics and mean best-so-far curves per optimizer."""
    if not traces:
        raise ValueError("need at least one trace")
    benchmarks = {t.metadata.get("config", {}).get("benchmark", "?")
                  for t in traces}
    if len(benchmarks) > 1:
        raise ValueError(f"traces mix benchmarks: {sorted(benchmarks)}")
    groups = {}
    for t in traces:
        opt = t.metadata.get("config", {}).get("optimizer", "?")
        groups.setdefault(opt, []).append(t)
    summary = {"benchmark": benchmarks.pop(), "groups": {}}
    for opt in sorted(groups):
        finals = np.array([t.best for t in groups[opt]])
        n = len(finals)
        stderr = float(np.std(finals, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        length = min(len(t.records) for t in groups[opt])
        curves = np.stack([t.curve[:length] for t in groups[opt]])
        summary["groups"][opt] = {
            "n_runs": n,
            "final_mean": float(finals.mean()),
            "final_stderr": stderr,
            "curve_iterations": list(range(1, length + 1)),
            "curve_mean": [float(v) for v in curves.mean(axis=0)],
        }
    return summary
