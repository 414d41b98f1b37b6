"""Food supply chain contamination control objective.

A binary decision per stage: intervene (pay a prevention cost, restore
contaminated stock at a random efficacy) or not (let contamination spread
at a random rate). The objective is the prevention cost plus a penalty
for the fraction of Monte-Carlo trajectories whose contamination level
exceeds a threshold at each stage, plus an optional L1 regularizer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class ContaminationConfig:
    d: int = 21
    lam: float = 0.0
    rho: float = 1.0
    n_trajectories: int = 100
    threshold: float = 0.1
    confidence: float = 0.05
    costs: Optional[tuple] = None  # None = unit cost per stage
    # beta-distribution parameters: implementer defaults, not ground
    # truth; override if a different random environment is wanted.
    init_params: tuple = (1.0, 30.0)
    spread_params: tuple = (1.0, 17.0 / 3.0)
    restore_params: tuple = (1.0, 3.0 / 7.0)
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.n_trajectories < 1:
            raise ValueError("n_trajectories must be >= 1")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")
        for name in ("init_params", "spread_params", "restore_params"):
            a, b = getattr(self, name)
            if a <= 0.0 or b <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.costs is not None and len(self.costs) != self.d:
            raise ValueError("costs length must equal d")


class ContaminationInstance:
    """A fixed random environment: beta draws shared by every evaluation.

    The same n_trajectories draws of initial contamination, spread rates
    and restoration efficacies are reused for every x, so the objective
    is a deterministic function per (config, seed).
    """

    def __init__(self, config: Optional[ContaminationConfig] = None):
        cfg = config if config is not None else ContaminationConfig()
        self.config = cfg
        rng = np.random.default_rng(cfg.seed)
        t, d = cfg.n_trajectories, cfg.d
        self.z_init = rng.beta(*cfg.init_params, size=t)
        self.spread = rng.beta(*cfg.spread_params, size=(t, d))
        self.restore = rng.beta(*cfg.restore_params, size=(t, d))
        if cfg.costs is None:
            self.costs = np.ones(d)
        else:
            self.costs = np.asarray(cfg.costs, dtype=float)

    def __call__(self, x: Sequence[int]) -> float:
        return contamination_objective(x, self)


def contamination_objective(x: Sequence[int], inst: ContaminationInstance) -> float:
    cfg = inst.config
    xa = np.asarray(x)
    if xa.shape != (cfg.d,):
        raise ValueError(f"expected {cfg.d} binary decisions, got shape {xa.shape}")
    z = inst.z_init
    exceed = 0
    for i in range(cfg.d):
        xi = float(xa[i])
        z = inst.spread[:, i] * (1.0 - xi) * (1.0 - z) + (1.0 - inst.restore[:, i] * xi) * z
        exceed += int(np.count_nonzero(z > cfg.threshold))
    # sum of costs at active stages; exact for 0/1 inputs
    prevention = float(np.sum(inst.costs[xa != 0]))
    penalty = cfg.rho * exceed / cfg.n_trajectories
    return prevention + penalty + cfg.lam * float(np.sum(xa != 0))
