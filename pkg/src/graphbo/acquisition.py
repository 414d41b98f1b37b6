"""Candidate proposal: averaged expected improvement with local refinement.

Scoring averages expected improvement over the sampled surrogate
hyperparameters. Maximization draws a wide uniform candidate set plus a
handful of sprayed perturbations of the incumbent, then climbs from the
top scorers to product-graph local maxima, preferring the highest scored
vertex that has not been evaluated yet.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import SearchSpaceExhaustedError
from .graphs import SearchSpace, Vertex
from .kernel import KernelFactors, cross_gram_fast, kernel_factors
from .surrogate import Dataset, GpParams, GpPosterior, PredictiveDistribution

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass
class AcquisitionConfig:
    n_random_candidates: int = 20_000
    n_spray: int = 20
    spray_radius: int = 2
    n_bfls_starts: int = 20
    # hook for an extra non-local refinement pass over the ranked results;
    # receives (vertex, value) pairs and the scoring callable, returns more
    # (vertex, value) pairs to merge before the final pick
    refine: Optional[Callable] = None

    def __post_init__(self):
        if min(self.n_random_candidates, self.n_spray, self.spray_radius,
               self.n_bfls_starts) < 1:
            raise ValueError("all acquisition sizes must be positive")
        if self.n_bfls_starts > self.n_random_candidates + self.n_spray:
            raise ValueError("n_bfls_starts exceeds the candidate pool")


class FactorCache:
    """Kernel factors per distinct scale vector, shared across predictions."""

    def __init__(self, space: SearchSpace):
        self.space = space
        self._store: dict[bytes, KernelFactors] = {}

    def get(self, betas) -> KernelFactors:
        key = np.ascontiguousarray(betas, dtype=np.float64).tobytes()
        hit = self._store.get(key)
        if hit is None:
            hit = kernel_factors(self.space, betas)
            self._store[key] = hit
        return hit


def expected_improvement(pred: PredictiveDistribution, y_best: float) -> float:
    """Expected improvement below y_best (minimization convention)."""
    gap = y_best - pred.mean
    if pred.variance <= 0.0:
        return max(gap, 0.0)
    sigma = math.sqrt(pred.variance)
    z = gap / sigma
    phi = _INV_SQRT_2PI * math.exp(-0.5 * z * z)
    return gap * float(ndtr(z)) + sigma * phi


def _ei_batch(mu: np.ndarray, var: np.ndarray, y_best: float) -> np.ndarray:
    gap = y_best - mu
    sigma = np.sqrt(var)
    out = np.maximum(gap, 0.0)
    pos = sigma > 0.0
    if np.any(pos):
        z = gap[pos] / sigma[pos]
        phi = _INV_SQRT_2PI * np.exp(-0.5 * z * z)
        out[pos] = gap[pos] * ndtr(z) + sigma[pos] * phi
    return out


class _BatchScorer:
    """Averaged expected improvement over posterior samples, vectorized."""

    def __init__(self, data: Dataset, samples: Sequence[GpParams],
                 space: SearchSpace, cache: FactorCache | None = None):
        if not samples:
            raise ValueError("need at least one posterior sample")
        if data.n < 1:
            raise ValueError("need at least one observation")
        cache = cache or FactorCache(space)
        self.y_best = float(data.values.min())
        self._X = data.index_array()
        self.posteriors = [
            GpPosterior(data, p, cache.get(p.betas)) for p in samples
        ]

    def score(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64)
        total = np.zeros(X.shape[0])
        for post in self.posteriors:
            k_star = cross_gram_fast(
                post.factors, X, self._X, post.params.signal_variance
            )
            mu, var = post.predict_batch(X, k_star=k_star)
            total += _ei_batch(mu, var, self.y_best)
        return total / len(self.posteriors)


def acquisition_value(v: Vertex, data: Dataset, samples: Sequence[GpParams],
                      factor_cache: FactorCache) -> float:
    """Mean expected improvement at one vertex across posterior samples."""
    if not samples:
        raise ValueError("need at least one posterior sample")
    y_best = float(data.values.min())
    total = 0.0
    for params in samples:
        factors = factor_cache.get(params.betas)
        post = GpPosterior(data, params, factors)
        mu, var = post.predict_batch(np.asarray(v, dtype=np.int64)[None, :])
        total += expected_improvement(
            PredictiveDistribution(float(mu[0]), float(var[0])), y_best
        )
    return total / len(samples)


def spray_vertices(v_best: Vertex, space: SearchSpace, radius: int,
                   count: int, rng: np.random.Generator) -> list[Vertex]:
    """Random perturbations of v_best within the given Hamming radius."""
    space.validate_vertex(v_best)
    if radius < 0 or count < 1:
        raise ValueError("radius must be nonnegative, count positive")
    changeable = [i for i in range(space.n_variables) if space.sizes[i] > 1]
    if radius == 0 or not changeable:
        return [tuple(v_best)] * count
    out = []
    for _ in range(count):
        r = int(rng.integers(1, radius + 1))
        r = min(r, len(changeable))
        picked = rng.choice(len(changeable), size=r, replace=False)
        v = list(v_best)
        for pos in picked:
            i = changeable[pos]
            draw = int(rng.integers(space.sizes[i] - 1))
            v[i] = draw + (draw >= v[i])  # skip the current category
        out.append(tuple(v))
    return out


def _best_move(current_value: float, neighbors: Sequence[Vertex],
               values: Sequence[float]):
    """Strictly improving neighbor with ties broken lexicographically."""
    best_v = None
    best_val = current_value
    for nb, val in zip(neighbors, values):
        if val > best_val or (val == best_val and best_v is not None
                              and nb < best_v):
            best_v, best_val = nb, val
    return best_v, best_val


def bfls(start: Vertex, acq: Callable[[Vertex], float],
         space: SearchSpace) -> tuple[Vertex, float]:
    """Greedy ascent over product-graph neighborhoods to a local maximum."""
    current = tuple(start)
    current_value = float(acq(current))
    while True:
        neighbors = space.neighbors(current)
        values = [float(acq(nb)) for nb in neighbors]
        move, value = _best_move(current_value, neighbors, values)
        if move is None:
            return current, current_value
        current, current_value = move, value


def _bfls_batched(start: Vertex, scorer: _BatchScorer, space: SearchSpace,
                  value_cache: dict) -> tuple[Vertex, float]:
    # same ascent rule as bfls, scoring each neighborhood in one batch
    current = tuple(start)
    current_value = value_cache[current]
    while True:
        neighbors = space.neighbors(current)
        fresh = [nb for nb in neighbors if nb not in value_cache]
        if fresh:
            vals = scorer.score(np.array(fresh, dtype=np.int64))
            value_cache.update(zip(fresh, vals.tolist()))
        values = [value_cache[nb] for nb in neighbors]
        move, value = _best_move(current_value, neighbors, values)
        if move is None:
            return current, current_value
        current, current_value = move, value


def next_vertex(data: Dataset, samples: Sequence[GpParams],
                space: SearchSpace, config: AcquisitionConfig | None = None,
                rng: np.random.Generator | None = None) -> Vertex:
    """Propose the next vertex to evaluate; never repeats an evaluated one."""
    config = config or AcquisitionConfig()
    rng = rng if rng is not None else np.random.default_rng()
    if data.n < 1:
        raise ValueError("need at least one observation")
    evaluated = set(data.vertices)
    if len(evaluated) >= space.total_size:
        raise SearchSpaceExhaustedError(
            f"all {space.total_size} vertices evaluated"
        )
    scorer = _BatchScorer(data, samples, space)
    if space.total_size <= config.n_random_candidates:
        candidates = list(space.enumerate_vertices())
    else:
        drawn = space.random_vertices(rng, config.n_random_candidates)
        candidates = [tuple(v) for v in drawn.tolist()]
        incumbent = data.vertices[int(np.argmin(data.values))]
        candidates += spray_vertices(
            incumbent, space, config.spray_radius, config.n_spray, rng
        )
        candidates = list(dict.fromkeys(candidates))
    values = scorer.score(np.array(candidates, dtype=np.int64))
    cache = dict(zip(candidates, values.tolist()))
    ranked_starts = sorted(candidates, key=lambda v: (-cache[v], v))
    for start in ranked_starts[:config.n_bfls_starts]:
        _bfls_batched(start, scorer, space, cache)
    if config.refine is not None:
        extra = config.refine(sorted(cache.items(),
                                     key=lambda kv: (-kv[1], kv[0])),
                              scorer.score)
        for v, val in extra or ():
            cache[tuple(v)] = float(val)
    for v, _ in sorted(cache.items(), key=lambda kv: (-kv[1], kv[0])):
        if v not in evaluated:
            return v
    # everything scored is already evaluated: fall back to a uniform
    # unevaluated vertex
    for _ in range(10_000):
        v = space.random_vertex(rng)
        if v not in evaluated:
            return v
    for v in space.enumerate_vertices():
        if v not in evaluated:
            return v
    raise SearchSpaceExhaustedError("no unevaluated vertex found")
