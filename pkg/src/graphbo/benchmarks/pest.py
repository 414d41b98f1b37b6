"""Pest control down a chain of stations.

Each station picks one of four pesticides or does nothing. Infestation
evolves like the contamination chain: untreated it spreads at a random
rate, treated it is knocked down by the chosen product's random
effectiveness. Two couplings make the problem higher-order:

  * a product gets cheaper the more often it was purchased at earlier
    stations (volume discount, floored),
  * a product gets weaker the more often it was used at earlier
    stations (acquired tolerance, inflating the beta parameter of its
    effectiveness distribution).

Effectiveness draws reuse one uniform per (trajectory, station) through
the inverse CDF, so the objective stays deterministic per seed even
though the distribution parameters depend on x.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import beta as beta_dist


@dataclass(frozen=True)
class PestConfig:
    n_stations: int = 21
    lam: float = 0.0
    rho: float = 1.0
    n_trajectories: int = 100
    threshold: float = 0.1
    base_costs: tuple = (1.0, 0.8, 0.7, 0.5)
    effectiveness_params: tuple = ((10.0, 2.0), (8.0, 3.0), (6.0, 4.0), (4.0, 6.0))
    init_params: tuple = (1.0, 30.0)
    spread_params: tuple = (1.0, 17.0 / 3.0)
    discount_rate: float = 0.05
    discount_floor: float = 0.5
    tolerance_rate: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.n_stations < 1:
            raise ValueError("n_stations must be >= 1")
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be >= 1")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if len(self.base_costs) != len(self.effectiveness_params):
            raise ValueError("one cost per pesticide required")
        for a, b in self.effectiveness_params:
            if a <= 0.0 or b <= 0.0:
                raise ValueError("effectiveness beta parameters must be positive")
        for name in ("init_params", "spread_params"):
            a, b = getattr(self, name)
            if a <= 0.0 or b <= 0.0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.discount_floor <= 1.0:
            raise ValueError("discount_floor must lie in [0, 1]")

    @property
    def n_choices(self) -> int:
        return len(self.base_costs) + 1


class PestInstance:
    """Fixed uniforms for every (trajectory, station) random quantity."""

    def __init__(self, config: Optional[PestConfig] = None):
        cfg = config if config is not None else PestConfig()
        self.config = cfg
        rng = np.random.default_rng(cfg.seed)
        t, d = cfg.n_trajectories, cfg.n_stations
        self.z_init = rng.beta(*cfg.init_params, size=t)
        self.spread = rng.beta(*cfg.spread_params, size=(t, d))
        # uniforms behind the effectiveness draws; transformed at
        # evaluation time because tolerance shifts the distribution
        self.u_eff = rng.random(size=(t, d))

    def __call__(self, x: Sequence[int]) -> float:
        return pest_objective(x, self)


def pest_objective(x: Sequence[int], inst: PestInstance) -> float:
    cfg = inst.config
    xa = np.asarray(x)
    if xa.shape != (cfg.n_stations,):
        raise ValueError(f"expected {cfg.n_stations} choices, got shape {xa.shape}")
    if np.any(xa < 0) or np.any(xa >= cfg.n_choices):
        raise ValueError(f"choices must lie in [0, {cfg.n_choices - 1}]")

    n_products = len(cfg.base_costs)
    purchases = [0] * n_products
    z = inst.z_init
    cost = 0.0
    exceed = 0
    for i in range(cfg.n_stations):
        choice = int(xa[i])
        if choice == 0:
            z = inst.spread[:, i] * (1.0 - z) + z
        else:
            p = choice - 1
            a, b = cfg.effectiveness_params[p]
            b_tol = b * (1.0 + cfg.tolerance_rate * purchases[p])
            eff = beta_dist.ppf(inst.u_eff[:, i], a, b_tol)
            z = (1.0 - eff) * z
            discount = max(cfg.discount_floor,
                           1.0 - cfg.discount_rate * purchases[p])
            cost += cfg.base_costs[p] * discount
            purchases[p] += 1
        exceed += int(np.count_nonzero(z > cfg.threshold))
    penalty = cfg.rho * exceed / cfg.n_trajectories
    return cost + penalty + cfg.lam * float(np.sum(xa != 0))
