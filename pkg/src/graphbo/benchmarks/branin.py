"""Branin function on a 51 x 51 grid.

Each axis is discretized with 51 equally spaced points; an index pair
maps linearly onto [0, 1]^2 and is rescaled to the classical domain
x1 in [-5, 10], x2 in [0, 15]. Coefficients are the standard ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

_A = 1.0
_B = 5.1 / (4.0 * math.pi ** 2)
_C = 5.0 / math.pi
_R = 6.0
_S = 10.0
_T = 1.0 / (8.0 * math.pi)


@dataclass(frozen=True)
class BraninConfig:
    n_points: int = 51
    seed: int = 0  # accepted for interface uniformity; the function is fixed

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("need at least 2 grid points per axis")


def branin(x1: float, x2: float) -> float:
    return (_A * (x2 - _B * x1 ** 2 + _C * x1 - _R) ** 2
            + _S * (1.0 - _T) * math.cos(x1) + _S)


def branin_discrete(v: Sequence[int], config: BraninConfig = BraninConfig()) -> float:
    i, j = v
    n = config.n_points
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"grid indices must lie in [0, {n - 1}]")
    t1 = i / (n - 1)
    t2 = j / (n - 1)
    return branin(-5.0 + 15.0 * t1, 15.0 * t2)


def grid_minimum(config: BraninConfig = BraninConfig()) -> tuple:
    """Exhaustive scan of the grid; returns (best vertex, best value)."""
    n = config.n_points
    best_v, best_val = None, math.inf
    for i in range(n):
        for j in range(n):
            val = branin_discrete((i, j), config)
            if val < best_val:
                best_v, best_val = (i, j), val
    return best_v, best_val
