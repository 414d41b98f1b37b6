"""Brute-force verification suites over small spaces.

Each suite exhaustively checks a contract that the fast code paths rely
on, using only enumeration and direct evaluation. Results are plain
(name, ok, detail) tuples so the command-line front end can print one
line per check and exit nonzero on any failure.
"""
from __future__ import annotations

import itertools
from typing import Optional

import numpy as np

from .benchmarks import (
    IsingConfig,
    IsingInstance,
    branin_discrete,
    brute_force_optimum,
    grid_minimum,
    parse_wcnf,
    wmaxsat_objective,
)
from .graphs import SearchSpace, SubGraph, shortest_path_oracle
from .kernel import gram, kernel_factors


def synthetic_wcnf(n_vars: int, n_clauses: int, seed: int) -> str:
    """Small random soft-clause WCNF text with integer weights."""
    rng = np.random.default_rng(seed)
    lines = [f"p wcnf {n_vars} {n_clauses}"]
    for _ in range(n_clauses):
        size = int(rng.integers(1, min(3, n_vars) + 1))
        variables = rng.choice(np.arange(1, n_vars + 1), size=size, replace=False)
        signs = rng.choice((-1, 1), size=size)
        weight = int(rng.integers(1, 10))
        lits = " ".join(str(int(v * s)) for v, s in zip(variables, signs))
        lines.append(f"{weight} {lits} 0")
    return "\n".join(lines) + "\n"


def branin_suite() -> list:
    checks = []
    v, val = grid_minimum()
    checks.append(("branin grid optimum", True,
                   f"vertex={v} value={val:.6f} over 2601 grid points"))
    checks.append(("branin above continuous optimum", val >= 0.397887,
                   f"{val:.6f} >= 0.397887"))
    samples = [(0, 0), (50, 50), (10, 40), (48, 8), (25, 25)]
    ok = all(branin_discrete(s) >= val for s in samples)
    checks.append(("branin optimum is a lower bound", ok,
                   f"{len(samples)} sampled grid values"))
    return checks


def maxsat_suite(n_instances: int = 5, seed: int = 2024) -> list:
    checks = []
    for k in range(n_instances):
        inst = parse_wcnf(synthetic_wcnf(10, 25, seed + k))
        x_best, val_best = brute_force_optimum(inst)
        rng = np.random.default_rng(seed + 100 + k)
        random_vals = [wmaxsat_objective(rng.integers(0, 2, size=10), inst)
                       for _ in range(50)]
        bound = float(np.sum(np.abs(inst.normalized_weights)))
        ok = (val_best <= min(random_vals) + 1e-12
              and abs(val_best) <= bound + 1e-12)
        checks.append((f"wcnf instance {k} brute-force optimum", ok,
                       f"optimum {val_best:.6f} at {x_best}"))
    return checks


def ising_suite() -> list:
    checks = []
    inst = IsingInstance(IsingConfig(lam=1e-2, seed=0))
    ones = np.ones(len(inst.edges), dtype=int)
    val = inst(ones)
    checks.append(("ising all-ones equals regularizer", val == 1e-2 * 24,
                   f"value {val!r}"))
    small = IsingInstance(IsingConfig(rows=2, cols=2, lam=0.0, seed=1))
    worst = -1.0
    for bits in itertools.product((0, 1), repeat=4):
        worst = max(worst, -small(np.array(bits)))
    checks.append(("ising KL nonnegative on 2x2 grid", worst <= 1e-10,
                   f"largest negative excursion {worst:.2e}"))
    return checks


def distance_suite() -> list:
    checks = []
    space = SearchSpace.categorical([3, 3])
    verts = list(space.enumerate_vertices())
    ok = all(shortest_path_oracle(space, a, b) == space.hamming(a, b)
             for a, b in itertools.combinations(verts, 2))
    checks.append(("complete-product distance equals Hamming", ok,
                   f"all {len(verts)} choose 2 pairs on a 3x3 space"))
    path_space = SearchSpace.ordinal([4, 3])
    pverts = list(path_space.enumerate_vertices())
    ok = all(shortest_path_oracle(path_space, a, b) >= path_space.hamming(a, b)
             for a, b in itertools.combinations(pverts, 2))
    checks.append(("path-product distance dominates Hamming", ok,
                   f"all pairs on a 4x3 ordinal space"))
    return checks


def kernel_suite() -> list:
    checks = []
    space = SearchSpace([SubGraph.complete(3), SubGraph.complete(2),
                         SubGraph.path(4)])
    verts = np.array(list(space.enumerate_vertices()))
    factors = kernel_factors(space, [0.7, 0.2, 1.3])
    k = gram(factors, verts, verts, 1.9)
    checks.append(("gram symmetric", bool(np.allclose(k, k.T, atol=1e-12)),
                   f"{k.shape[0]} vertices"))
    w = np.linalg.eigvalsh((k + k.T) / 2.0)
    checks.append(("gram positive semidefinite", bool(w[0] >= -1e-8),
                   f"smallest eigenvalue {w[0]:.2e}"))
    flat = kernel_factors(space, [0.0, 0.0, 0.0])
    k0 = gram(flat, verts, verts, 2.5)
    ok = bool(np.allclose(k0, 2.5 * np.eye(len(verts)), atol=1e-12))
    checks.append(("zero scales give a diagonal gram", ok,
                   "kernel reduces to signal variance times identity"))
    return checks


SUITES = {
    "branin": branin_suite,
    "maxsat": maxsat_suite,
    "ising": ising_suite,
    "distance": distance_suite,
    "kernel": kernel_suite,
}


def run_suites(names: Optional[list] = None) -> list:
    selected = names or sorted(SUITES)
    results = []
    for name in selected:
        results.extend(SUITES[name]())
    return results
