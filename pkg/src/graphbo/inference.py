"""Slice-sampled posterior over the surrogate hyperparameters.

One sweep updates the constant mean, the signal variance, the noise variance,
and then every per-variable scale in a freshly shuffled order, each by one
univariate slice-sampling transition of its full conditional. The mean gets a
truncated Gaussian prior over the observed value range, the signal variance a
truncated Gaussian over a range implied by the unit-signal Gram, and the
scales and the noise variance a heavy-tailed shrinkage prior through its
closed-form density bound.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.special import ndtr

from .errors import NumericError
from .graphs import SearchSpace
from .kernel import gram, kernel_factors, variable_factor
from .surrogate import Dataset, GpParams, JITTER_LADDER

logger = logging.getLogger(__name__)

HORSESHOE_CONSTANT = float((2.0 * math.pi**3) ** -0.5)

_LOG_2PI = math.log(2.0 * math.pi)
_TINY = float(np.finfo(np.float64).tiny)
# ceiling for the signal-variance support: a singular unit Gram floors its
# smallest eigenvalue at _TINY and var(y)/_TINY overflows to inf
_SV_CAP = 1e300


@dataclass(frozen=True)
class PriorConfig:
    """Constants of the hyperparameter priors."""

    tau_beta: float = 5.0
    tau_noise: float = math.sqrt(0.05)
    horseshoe_constant: float = HORSESHOE_CONSTANT
    # stand-in signal variance when the data has zero variance
    signal_variance_floor: float = 1e-8

    def __post_init__(self):
        for name in ("tau_beta", "tau_noise", "horseshoe_constant",
                     "signal_variance_floor"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")


@dataclass
class SamplerConfig:
    n_burn_in: int = 100
    n_samples: int = 10
    slice_width: float = 1.0
    max_doublings: int = 20
    burn_in_every_fit: bool = False

    def __post_init__(self):
        if self.n_burn_in < 0 or self.n_samples < 1:
            raise ValueError("need n_burn_in >= 0 and n_samples >= 1")
        if self.slice_width <= 0 or self.max_doublings < 0:
            raise ValueError("need positive slice_width, max_doublings >= 0")


@dataclass
class SamplerState:
    """Mutable chain state: current parameters, rng stream, burn-in flag."""

    current: GpParams
    rng: np.random.Generator
    burned_in: bool = False

    @classmethod
    def initialize(
        cls,
        data: Dataset,
        space: SearchSpace,
        priors: PriorConfig | None = None,
        seed=0,
    ) -> "SamplerState":
        priors = priors or PriorConfig()
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        if data.n < 1:
            raise ValueError("need at least one observation")
        y = data.values
        m = float(y.mean())
        y_var = float(y.var())
        betas = np.ones(space.n_variables)
        if y_var > 0.0:
            K = gram(kernel_factors(space, betas), data.index_array(),
                     data.index_array(), 1.0)
            kmin, kmax = _eigen_extremes(K)
            sf2 = min(max(y_var, y_var / kmax), y_var / kmin)
            sn2 = 1e-3 * y_var
        else:
            sf2 = priors.signal_variance_floor
            sn2 = 1e-6
        return cls(GpParams(m, sf2, sn2, betas), rng, False)


def _eigen_extremes(K: np.ndarray) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a symmetric PSD matrix, floored."""
    try:
        w = np.linalg.eigvalsh(K)
    except np.linalg.LinAlgError as exc:
        raise NumericError("Gram eigenvalue computation failed") from exc
    return max(float(w[0]), _TINY), max(float(w[-1]), _TINY)


def _log_truncated_normal(x, mu, sigma, lo, hi):
    if not lo <= x <= hi:
        return -math.inf
    if sigma <= 0.0:
        return 0.0 if x == mu else -math.inf
    z = (x - mu) / sigma
    mass = ndtr((hi - mu) / sigma) - ndtr((lo - mu) / sigma)
    if mass <= 0.0:
        # the support is many sigmas from the location; fall back to the
        # unnormalized shape so the slice still sees a finite landscape
        return -0.5 * z * z - math.log(sigma) - 0.5 * _LOG_2PI
    return -0.5 * z * z - math.log(sigma) - 0.5 * _LOG_2PI - math.log(mass)


def log_prior_mean(m: float, data: Dataset) -> float:
    """Truncated Gaussian over [y_min, y_max] centered at the mean of y."""
    if data.n < 1:
        raise ValueError("need at least one observation")
    y = data.values
    y_min, y_max = float(y.min()), float(y.max())
    if y_max == y_min:
        return 0.0 if m == float(y.mean()) else -math.inf
    return _log_truncated_normal(
        m, float(y.mean()), (y_max - y_min) / 4.0, y_min, y_max
    )


def _sv_bounds(y_var: float, kmin: float, kmax: float):
    lo = y_var / kmax
    hi = min(y_var / kmin, _SV_CAP)
    lo = min(lo, hi)
    mu = 0.5 * (lo + hi)
    sigma = 0.25 * (lo + hi)
    return lo, hi, mu, sigma


def _log_prior_sv_from_bounds(sf2, y_var, kmin, kmax, floor):
    if y_var == 0.0:
        return 0.0 if sf2 == floor else -math.inf
    lo, hi, mu, sigma = _sv_bounds(y_var, kmin, kmax)
    return _log_truncated_normal(sf2, mu, sigma, lo, hi)


def log_prior_signal_variance(
    sf2: float, data: Dataset, factors, floor: float = 1e-8
) -> float:
    """Truncated Gaussian implied by the unit-signal Gram of the data.

    Support runs from var(y)/K_max to var(y)/K_min where K_min and K_max are
    the extreme eigenvalues of the Gram at unit signal variance; zero data
    variance collapses the prior onto ``floor``.
    """
    if data.n < 1:
        raise ValueError("need at least one observation")
    y_var = float(data.values.var())
    if y_var == 0.0:
        return 0.0 if sf2 == floor else -math.inf
    X = data.index_array()
    kmin, kmax = _eigen_extremes(gram(factors, X, X, 1.0))
    return _log_prior_sv_from_bounds(sf2, y_var, kmin, kmax, floor)


def log_prior_horseshoe(
    x: float, tau: float, constant: float = HORSESHOE_CONSTANT
) -> float:
    """Log of the closed-form upper bound on the shrinkage density.

    The bound is monotone decreasing in |x| and diverges at zero, so values
    below 1e-6*tau are capped at the density of 1e-6*tau.
    """
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    x_eff = max(abs(x), 1e-6 * tau)
    return math.log(constant * math.log1p(2.0 * tau * tau / (x_eff * x_eff)))


def _doubling_acceptable(log_density, x0, x1, level, left, right, width):
    # retrace the doubling sequence; reject x1 if a rejected middle crossing
    # separates it from x0 (detailed-balance check for the doubling scheme)
    lo, hi = left, right
    differ = False
    while hi - lo > 1.1 * width:
        mid = 0.5 * (lo + hi)
        if (x0 < mid <= x1) or (x1 < mid <= x0):
            differ = True
        if x1 < mid:
            hi = mid
        else:
            lo = mid
        if differ and level >= log_density(lo) and level >= log_density(hi):
            return False
    return True


def slice_sample_univariate(
    log_density,
    x0: float,
    rng: np.random.Generator,
    width: float = 1.0,
    max_doublings: int = 20,
) -> float:
    """One slice-sampling transition with doubling expansion and shrinkage."""
    logf0 = log_density(x0)
    if not math.isfinite(logf0):
        raise ValueError("log_density(x0) must be finite")
    level = logf0 + math.log1p(-rng.random())
    u = rng.random()
    left = x0 - width * u
    right = left + width
    lf_left = log_density(left)
    lf_right = log_density(right)
    remaining = max_doublings
    while lf_left > level or lf_right > level:
        if remaining == 0:
            logger.warning(
                "slice interval still open after %d doublings", max_doublings
            )
            break
        if rng.random() < 0.5:
            left -= right - left
            lf_left = log_density(left)
        else:
            right += right - left
            lf_right = log_density(right)
        remaining -= 1
    lo, hi = left, right
    while True:
        x1 = lo + (hi - lo) * rng.random()
        lf1 = log_density(x1)
        if lf1 > level and _doubling_acceptable(
            log_density, x0, x1, level, left, right, width
        ):
            return x1
        if x1 < x0:
            lo = x1
        else:
            hi = x1
        if not hi - lo > 0.0:
            return x0  # interval shrank to the starting point


class _SweepEngine:
    """Full-conditional evaluations over one dataset, tuned for the sweep.

    Keeps per-variable Gram gathers and their running products so a scale
    update touches one Hadamard product and one Cholesky per density call,
    and the mean/variance updates reuse one eigendecomposition per sweep.
    """

    def __init__(self, data, state, priors, space, config):
        self.space = space
        self.priors = priors
        self.config = config
        self.rng = state.rng
        self.X = data.index_array()
        self.y = data.values
        self.n = data.n
        self.d = space.n_variables
        y = self.y
        self.y_mean = float(y.mean())
        self.y_min = float(y.min())
        self.y_max = float(y.max())
        self.y_var = float(y.var())
        params = state.current
        self.m = params.mean
        self.sf2 = params.signal_variance
        self.sn2 = params.noise_variance
        self.betas = np.array(params.betas, dtype=np.float64)
        # pair index map per variable: flat index into that factor matrix
        self._pair_idx = [
            (self.X[:, i][:, None] * space.sizes[i] + self.X[None, :, i])
            for i in range(self.d)
        ]
        self._gathers = [self._gather(i, self.betas[i]) for i in range(self.d)]
        self._S_buf = np.empty((self.n, self.n))
        self._ones = np.ones(self.n)

    def snapshot(self) -> GpParams:
        return GpParams(self.m, self.sf2, self.sn2, self.betas.copy())

    def _gather(self, i: int, beta: float) -> np.ndarray:
        f = variable_factor(self.space.eigensystems[i], beta)
        return np.take(f.ravel(), self._pair_idx[i])

    def _product_except(self, skip: int | None = None) -> np.ndarray:
        out = np.ones((self.n, self.n))
        for i, g in enumerate(self._gathers):
            if i != skip:
                out *= g
        return out

    def _loglik_chol(self, K_unit, m, sf2, sn2) -> float:
        n = self.n
        diag_mean = sf2 * float(np.trace(K_unit)) / n + sn2
        for rel in JITTER_LADDER:
            np.multiply(K_unit, sf2, out=self._S_buf)
            self._S_buf.flat[:: n + 1] += sn2 + rel * diag_mean
            try:
                L = scipy.linalg.cholesky(
                    self._S_buf, lower=True, overwrite_a=True, check_finite=False
                )
            except scipy.linalg.LinAlgError:
                continue
            z = scipy.linalg.solve_triangular(
                L, self.y - m, lower=True, check_finite=False
            )
            logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
            return -0.5 * float(z @ z) - 0.5 * logdet - 0.5 * n * _LOG_2PI
        raise NumericError(
            f"training covariance not factorizable at sf2={sf2:.3e}, "
            f"sn2={sn2:.3e} even with jitter"
        )

    def _slice(self, log_density, x0):
        return slice_sample_univariate(
            log_density,
            x0,
            self.rng,
            width=self.config.slice_width,
            max_doublings=self.config.max_doublings,
        )

    def sweep(self, listener=None):
        cfg = self.config
        priors = self.priors
        K_unit = self._product_except(None)
        try:
            lam, Q = np.linalg.eigh(K_unit)
        except np.linalg.LinAlgError as exc:
            raise NumericError("unit Gram eigendecomposition failed") from exc
        lam = np.maximum(lam, 0.0)
        kmin = max(float(lam[0]), _TINY)
        kmax = max(float(lam[-1]), _TINY)
        qy = Q.T @ self.y
        q1 = Q.T @ self._ones

        def loglik_eig(m, sf2, sn2):
            denom = sf2 * lam + sn2
            r = qy - m * q1
            return (
                -0.5 * float(np.sum(r * r / denom))
                - 0.5 * float(np.sum(np.log(denom)))
                - 0.5 * self.n * _LOG_2PI
            )

        # mean: skipped when the prior is a point mass at the data mean
        if self.y_max > self.y_min:
            sigma_m = (self.y_max - self.y_min) / 4.0

            def logp_m(m):
                lp = _log_truncated_normal(
                    m, self.y_mean, sigma_m, self.y_min, self.y_max
                )
                if lp == -math.inf:
                    return lp
                return loglik_eig(m, self.sf2, self.sn2) + lp

            self.m = self._slice(logp_m, self.m)
            if listener:
                listener("mean", self.m)

        # signal variance: truncated Gaussian prior, log-coordinate moves;
        # the support follows the Gram at the current scales, so a value
        # accepted under older scales may need pulling back inside first
        if self.y_var > 0.0:
            lo, hi, mu_sv, sigma_sv = _sv_bounds(self.y_var, kmin, kmax)

            def logp_log_sf2(z):
                if abs(z) > 700.0:
                    return -math.inf  # exp would leave double range
                sf2 = math.exp(z)
                # exp(log(bound)) may round a hair past the bound; pull
                # near-boundary values back onto the support instead of
                # zeroing the density at the slice start
                if not lo <= sf2 <= hi:
                    if lo * (1.0 - 1e-12) <= sf2 <= hi * (1.0 + 1e-12):
                        sf2 = min(max(sf2, lo), hi)
                    else:
                        return -math.inf
                lp = _log_truncated_normal(sf2, mu_sv, sigma_sv, lo, hi)
                if lp == -math.inf:
                    return lp
                # + z is the Jacobian of the log transform
                return loglik_eig(self.m, sf2, self.sn2) + lp + z

            start = min(max(self.sf2, lo), hi)
            accepted = math.exp(self._slice(logp_log_sf2, math.log(start)))
            self.sf2 = min(max(accepted, lo), hi)
            if listener:
                listener("signal_variance", self.sf2)

        # noise variance
        def logp_sn2(x):
            if x <= 0.0:
                return -math.inf
            return loglik_eig(self.m, self.sf2, x) + log_prior_horseshoe(
                x, priors.tau_noise, priors.horseshoe_constant
            )

        self.sn2 = self._slice(logp_sn2, self.sn2)
        if listener:
            listener("noise_variance", self.sn2)

        # per-variable scales, freshly shuffled order
        order = self.rng.permutation(self.d)
        suffix = [None] * (len(order) + 1)
        suffix[-1] = np.ones((self.n, self.n))
        for pos in range(len(order) - 1, -1, -1):
            suffix[pos] = suffix[pos + 1] * self._gathers[order[pos]]
        prefix = np.ones((self.n, self.n))
        for pos, i in enumerate(order):
            i = int(i)
            K_rest = prefix * suffix[pos + 1]
            cache: dict[float, float] = {}

            def logp_beta(b, i=i, K_rest=K_rest, cache=cache):
                if b < 0.0:
                    return -math.inf
                hit = cache.get(b)
                if hit is not None:
                    return hit
                K_cand = K_rest * self._gather(i, b)
                ll = self._loglik_chol(K_cand, self.m, self.sf2, self.sn2)
                lp = ll + log_prior_horseshoe(
                    b, priors.tau_beta, priors.horseshoe_constant
                )
                cache[b] = lp
                return lp

            self.betas[i] = self._slice(logp_beta, float(self.betas[i]))
            self._gathers[i] = self._gather(i, float(self.betas[i]))
            prefix = prefix * self._gathers[i]
            if listener:
                listener(f"beta_{i}", float(self.betas[i]))


def fit_surrogate(
    data: Dataset,
    state: SamplerState,
    priors: PriorConfig,
    space: SearchSpace,
    config: SamplerConfig | None = None,
    update_listener=None,
) -> list[GpParams]:
    """Draw posterior samples of the surrogate hyperparameters.

    Burns in with full sweeps on the first call for this state (or every
    call if configured), then returns one parameter snapshot per sweep,
    without thinning. The state is advanced in place.
    """
    if data.n < 1:
        raise ValueError("need at least one observation")
    config = config or SamplerConfig()
    engine = _SweepEngine(data, state, priors, space, config)
    if config.burn_in_every_fit or not state.burned_in:
        for _ in range(config.n_burn_in):
            engine.sweep(update_listener)
        state.burned_in = True
    samples = []
    for _ in range(config.n_samples):
        engine.sweep(update_listener)
        samples.append(engine.snapshot())
    state.current = engine.snapshot()
    return samples
