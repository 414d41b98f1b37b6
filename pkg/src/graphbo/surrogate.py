"""Gaussian-process regression pieces: marginal likelihood and prediction.

The covariance between evaluated vertices is the product kernel from
``kernel_factors`` plus observation noise on the diagonal. Factorizations go
through Cholesky with an escalating relative jitter ladder because
hyperparameter sampling can visit near-degenerate scale vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import NumericError
from .graphs import Vertex
from .kernel import KernelFactors, _as_index_array, gram

JITTER_LADDER = (0.0, 1e-8, 1e-7, 1e-6)

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GpParams:
    """Hyperparameters of the surrogate: constant mean, scales, noise."""

    mean: float
    signal_variance: float
    noise_variance: float
    betas: np.ndarray

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=np.float64).copy()
        betas.setflags(write=False)
        object.__setattr__(self, "betas", betas)
        if not math.isfinite(self.mean):
            raise ValueError("mean must be finite")
        if not (self.signal_variance > 0.0 and math.isfinite(self.signal_variance)):
            raise ValueError("signal_variance must be positive and finite")
        if not (self.noise_variance > 0.0 and math.isfinite(self.noise_variance)):
            raise ValueError("noise_variance must be positive and finite")
        if betas.ndim != 1 or not np.all(np.isfinite(betas)) or np.any(betas < 0):
            raise ValueError("betas must be a nonnegative finite vector")


@dataclass(frozen=True)
class Dataset:
    """Evaluated vertices with their objective values."""

    vertices: tuple[Vertex, ...]
    values: np.ndarray

    def __post_init__(self):
        vertices = tuple(tuple(int(c) for c in v) for v in self.vertices)
        values = np.asarray(self.values, dtype=np.float64).copy()
        if values.ndim != 1 or len(vertices) != values.shape[0]:
            raise ValueError("vertices and values must have matching lengths")
        if values.size and not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def append(self, vertex: Sequence[int], value: float) -> "Dataset":
        return Dataset(
            self.vertices + (tuple(int(c) for c in vertex),),
            np.append(self.values, float(value)),
        )

    def index_array(self) -> np.ndarray:
        if not self.vertices:
            return np.zeros((0, 0), dtype=np.int64)
        return np.asarray(self.vertices, dtype=np.int64)


@dataclass(frozen=True)
class PredictiveDistribution:
    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0.0:
            raise ValueError("variance must be nonnegative")


def cholesky_with_jitter(S: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of S, retrying with growing diagonal jitter.

    Returns the factor and the jitter actually added. Raises NumericError
    after the ladder is exhausted.
    """
    mean_diag = float(np.mean(np.diag(S))) if S.shape[0] else 0.0
    last_exc = None
    for rel in JITTER_LADDER:
        jitter = rel * mean_diag
        try:
            attempt = S if jitter == 0.0 else S + jitter * np.eye(S.shape[0])
            L = scipy.linalg.cholesky(attempt, lower=True, check_finite=False)
            return L, jitter
        except scipy.linalg.LinAlgError as exc:
            last_exc = exc
    raise NumericError(
        f"Cholesky failed for a {S.shape[0]}x{S.shape[0]} covariance even "
        f"with relative jitter {JITTER_LADDER[-1]:g} (mean diagonal "
        f"{mean_diag:.3e})"
    ) from last_exc


def _training_cov(data: Dataset, params: GpParams, factors: KernelFactors):
    X = data.index_array()
    K = gram(factors, X, X, params.signal_variance)
    K[np.diag_indices_from(K)] += params.noise_variance
    return X, K


def neg_log_marginal_likelihood(
    data: Dataset, params: GpParams, factors: KernelFactors
) -> float:
    """0.5 r' S^-1 r + 0.5 log|S| + (n/2) log 2pi with S the noisy Gram."""
    if data.n < 1:
        raise ValueError("need at least one observation")
    _, S = _training_cov(data, params, factors)
    L, _ = cholesky_with_jitter(S)
    r = data.values - params.mean
    z = scipy.linalg.solve_triangular(L, r, lower=True, check_finite=False)
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    return 0.5 * float(z @ z) + 0.5 * logdet + 0.5 * data.n * _LOG_2PI


class GpPosterior:
    """Factored posterior for one (data, params, factors) triple.

    Caches the Cholesky factor and weight vector so batches of prediction
    queries cost one triangular solve each.
    """

    def __init__(self, data: Dataset, params: GpParams, factors: KernelFactors):
        self.data = data
        self.params = params
        self.factors = factors
        if data.n:
            self._X, S = _training_cov(data, params, factors)
            self._L, self.jitter = cholesky_with_jitter(S)
            r = data.values - params.mean
            self._alpha = scipy.linalg.cho_solve(
                (self._L, True), r, check_finite=False
            )
        else:
            self._X = None
            self._L = None
            self._alpha = None
            self.jitter = 0.0

    def _prior_variance(self, idx: np.ndarray) -> np.ndarray:
        out = np.full(idx.shape[0], self.params.signal_variance)
        for i, f in enumerate(self.factors.factors):
            out *= f[idx[:, i], idx[:, i]]
        return out

    def predict_batch(self, X_star, k_star=None) -> tuple[np.ndarray, np.ndarray]:
        # k_star: optional precomputed cross covariance against the data,
        # shape (len(X_star), n), already scaled by the signal variance
        idx = _as_index_array(self.factors, X_star, "X_star")
        prior_var = self._prior_variance(idx)
        if self._X is None:
            return np.full(idx.shape[0], self.params.mean), prior_var
        if k_star is None:
            K_star = gram(self.factors, idx, self._X, self.params.signal_variance)
        else:
            K_star = k_star
            if K_star.shape != (idx.shape[0], self.data.n):
                raise ValueError("k_star shape mismatch")
        mu = self.params.mean + K_star @ self._alpha
        V = scipy.linalg.solve_triangular(
            self._L, K_star.T, lower=True, check_finite=False
        )
        var = prior_var - np.einsum("ij,ij->j", V, V)
        return mu, np.maximum(var, 0.0)


def predict(
    v_star: Sequence[int],
    data: Dataset,
    params: GpParams,
    factors: KernelFactors,
) -> PredictiveDistribution:
    """Posterior mean and variance at one vertex; prior if data is empty."""
    posterior = GpPosterior(data, params, factors)
    mu, var = posterior.predict_batch(np.asarray(v_star, dtype=np.int64)[None, :])
    return PredictiveDistribution(float(mu[0]), float(var[0]))
