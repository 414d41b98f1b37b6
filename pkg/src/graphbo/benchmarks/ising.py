"""Ising model sparsification by exact KL divergence.

The dense model p puts mass exp(z'Jz)/Z_p on each spin state z in
{-1,+1}^16, with J a random symmetric interaction matrix supported on
the edges of a 4x4 grid. A binary decision per edge keeps or drops that
interaction, giving a sparsified model q. The objective is the exact
KL divergence D(p||q), computed by enumerating all 2^16 spin states,
plus an L1 regularizer on the kept-edge indicators.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp


@dataclass(frozen=True)
class IsingConfig:
    rows: int = 4
    cols: int = 4
    lam: float = 1e-2
    interaction_low: float = 0.05
    interaction_high: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must be at least 1x1")
        if self.rows * self.cols > 20:
            raise ValueError("exact enumeration limited to 2^20 spin states")
        if not self.interaction_low <= self.interaction_high:
            raise ValueError("empty interaction range")


def grid_edges(rows: int, cols: int) -> list:
    """Edges of a rows x cols grid, horizontal first then vertical.

    Spins are numbered row-major; each edge is an (i, j) pair with i < j.
    The order fixes the meaning of each decision variable.
    """
    edges = []
    for r in range(rows):
        for c in range(cols - 1):
            i = r * cols + c
            edges.append((i, i + 1))
    for r in range(rows - 1):
        for c in range(cols):
            i = r * cols + c
            edges.append((i, i + cols))
    return edges


class IsingInstance:
    """A fixed dense model with precomputed spin-state statistics."""

    def __init__(self, config: Optional[IsingConfig] = None):
        cfg = config if config is not None else IsingConfig()
        self.config = cfg
        self.edges = grid_edges(cfg.rows, cfg.cols)
        n_spins = cfg.rows * cfg.cols
        rng = np.random.default_rng(cfg.seed)
        self.weights = rng.uniform(cfg.interaction_low, cfg.interaction_high,
                                   size=len(self.edges))
        self.interaction = np.zeros((n_spins, n_spins))
        for w, (i, j) in zip(self.weights, self.edges):
            self.interaction[i, j] = w
            self.interaction[j, i] = w

        # all 2^n spin states as +-1 rows, and the per-edge spin products
        # that turn z'Jz into a single matrix-vector product per x
        states = ((np.arange(2 ** n_spins)[:, None]
                   >> np.arange(n_spins)[None, :]) & 1) * 2 - 1
        ii = np.array([e[0] for e in self.edges])
        jj = np.array([e[1] for e in self.edges])
        self._edge_products = (states[:, ii] * states[:, jj]).astype(float)
        # z'Jz doubles each edge term because J holds both triangles
        self._energies = self._edge_products @ (2.0 * self.weights)
        self._log_z_dense = float(logsumexp(self._energies))
        self._probs = np.exp(self._energies - self._log_z_dense)

    def __call__(self, x: Sequence[int]) -> float:
        return ising_kl_objective(x, self)


def ising_kl_objective(x: Sequence[int], inst: IsingInstance) -> float:
    xa = np.asarray(x, dtype=float)
    n_edges = len(inst.edges)
    if xa.shape != (n_edges,):
        raise ValueError(f"expected {n_edges} edge decisions, got shape {xa.shape}")
    energies_sparse = inst._edge_products @ (2.0 * (inst.weights * xa))
    log_z_sparse = float(logsumexp(energies_sparse))
    expected_gap = float(inst._probs @ (inst._energies - energies_sparse))
    kl = expected_gap + log_z_sparse - inst._log_z_dense
    return kl + inst.config.lam * float(np.sum(xa != 0))
