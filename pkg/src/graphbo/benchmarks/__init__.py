"""Benchmark objectives and the registry that pairs them with search spaces.

Each entry builds, from a plain config dict, the per-variable graphs and
a deterministic objective over vertex tuples. Config dicts are checked
against the benchmark's config fields; unknown keys are rejected so a
typo cannot silently fall back to a default.
"""
from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass
from typing import Callable, Optional

from ..graphs import SearchSpace
from .branin import BraninConfig, branin, branin_discrete, grid_minimum
from .contamination import (
    ContaminationConfig,
    ContaminationInstance,
    contamination_objective,
)
from .ising import IsingConfig, IsingInstance, grid_edges, ising_kl_objective
from .maxsat import (
    WcnfInstance,
    brute_force_optimum,
    make_instance,
    normalize_weights,
    parse_wcnf,
    serialize_wcnf,
    wmaxsat_objective,
)
from .pest import PestConfig, PestInstance, pest_objective

__all__ = [
    "Benchmark",
    "BraninConfig",
    "ContaminationConfig",
    "ContaminationInstance",
    "IsingConfig",
    "IsingInstance",
    "MaxSatConfig",
    "PestConfig",
    "PestInstance",
    "WcnfInstance",
    "benchmark_names",
    "branin",
    "branin_discrete",
    "brute_force_optimum",
    "contamination_objective",
    "grid_edges",
    "grid_minimum",
    "ising_kl_objective",
    "make_benchmark",
    "make_instance",
    "normalize_weights",
    "parse_wcnf",
    "pest_objective",
    "serialize_wcnf",
    "wmaxsat_objective",
]


@dataclass(frozen=True)
class MaxSatConfig:
    """Source of a WCNF instance: inline text or a file path, not both."""
    text: Optional[str] = None
    path: Optional[str] = None
    normalization: str = "standardize"
    seed: int = 0  # accepted for interface uniformity; instances are files

    def __post_init__(self):
        if (self.text is None) == (self.path is None):
            raise ValueError("provide exactly one of 'text' or 'path'")


@dataclass(frozen=True)
class Benchmark:
    name: str
    space: SearchSpace
    objective: Callable
    config: object
    metadata: dict


def _config_from_dict(cls, overrides: Optional[dict]):
    overrides = dict(overrides or {})
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {', '.join(unknown)}")
    return cls(**overrides)


def _build_contamination(overrides) -> Benchmark:
    cfg = _config_from_dict(ContaminationConfig, overrides)
    inst = ContaminationInstance(cfg)
    return Benchmark("contamination", SearchSpace.binary(cfg.d), inst, cfg,
                     dataclasses.asdict(cfg))


def _build_ising(overrides) -> Benchmark:
    cfg = _config_from_dict(IsingConfig, overrides)
    inst = IsingInstance(cfg)
    return Benchmark("ising", SearchSpace.binary(len(inst.edges)), inst, cfg,
                     dataclasses.asdict(cfg))


def _build_branin(overrides) -> Benchmark:
    cfg = _config_from_dict(BraninConfig, overrides)
    space = SearchSpace.ordinal([cfg.n_points, cfg.n_points])

    def objective(v):
        return branin_discrete(v, cfg)

    return Benchmark("branin", space, objective, cfg, dataclasses.asdict(cfg))


def _build_pest(overrides) -> Benchmark:
    cfg = _config_from_dict(PestConfig, overrides)
    inst = PestInstance(cfg)
    space = SearchSpace.categorical([cfg.n_choices] * cfg.n_stations)
    return Benchmark("pest", space, inst, cfg, dataclasses.asdict(cfg))


def _build_maxsat(overrides) -> Benchmark:
    cfg = _config_from_dict(MaxSatConfig, overrides)
    if cfg.path is not None:
        with open(cfg.path, "r", encoding="ascii") as fh:
            text = fh.read()
    else:
        text = cfg.text
    inst = parse_wcnf(text, normalization=cfg.normalization)

    def objective(v):
        return wmaxsat_objective(v, inst)

    meta = {
        "path": cfg.path,
        "normalization": cfg.normalization,
        "n_vars": inst.n_vars,
        "n_clauses": inst.n_clauses,
        "sha256": hashlib.sha256(text.encode("ascii")).hexdigest(),
    }
    return Benchmark("maxsat", SearchSpace.binary(inst.n_vars), objective, cfg, meta)


_REGISTRY = {
    "contamination": _build_contamination,
    "ising": _build_ising,
    "branin": _build_branin,
    "pest": _build_pest,
    "maxsat": _build_maxsat,
}


def benchmark_names() -> list:
    return sorted(_REGISTRY)


def make_benchmark(name: str, config: Optional[dict] = None) -> Benchmark:
    try:
        builder = _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown benchmark {name!r}; known: {', '.join(benchmark_names())}"
        ) from None
    return builder(config)
