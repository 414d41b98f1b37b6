import math

import numpy as np
import pytest

import reference
from graphbo.errors import NumericError
from graphbo.graphs import SearchSpace, laplacian
from graphbo.kernel import gram, kernel_factors
from graphbo.surrogate import (
    Dataset,
    GpParams,
    cholesky_with_jitter,
    neg_log_marginal_likelihood,
    predict,
    GpPosterior,
)


def _random_dataset(space, rng, n):
    X = space.random_vertices(rng, n)
    y = rng.standard_normal(n)
    return Dataset(tuple(map(tuple, X.tolist())), y)


def _space_laplacians(space):
    return [laplacian(g) for g in space.subgraphs]


class TestGpParams:
    def test_invariants(self):
        with pytest.raises(ValueError):
            GpParams(0.0, -1.0, 0.1, np.ones(2))
        with pytest.raises(ValueError):
            GpParams(0.0, 1.0, 0.0, np.ones(2))
        with pytest.raises(ValueError):
            GpParams(0.0, 1.0, 0.1, np.array([1.0, -0.5]))
        with pytest.raises(ValueError):
            GpParams(math.nan, 1.0, 0.1, np.ones(2))

    def test_betas_readonly(self):
        p = GpParams(0.0, 1.0, 0.1, np.ones(3))
        with pytest.raises(ValueError):
            p.betas[0] = 2.0


class TestDataset:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            Dataset(((0,), (1,)), np.zeros(3))

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            Dataset(((0,), (1,)), np.array([0.0, math.nan]))

    def test_append_leaves_original(self):
        d = Dataset(((0, 1),), np.array([2.0]))
        d2 = d.append((1, 0), -1.0)
        assert d.n == 1 and d2.n == 2
        assert d2.vertices[-1] == (1, 0)
        assert d2.values[-1] == -1.0

    def test_index_array(self):
        d = Dataset(((0, 1), (2, 0)), np.zeros(2))
        np.testing.assert_array_equal(d.index_array(), [[0, 1], [2, 0]])


class TestNegLogMarginalLikelihood:
    def test_unit_scalar(self):
        # one observation, total variance 1, zero residual
        space = SearchSpace.binary(1)
        factors = kernel_factors(space, np.zeros(1))
        data = Dataset(((0,),), np.array([0.0]))
        params = GpParams(0.0, 0.6, 0.4, np.zeros(1))
        nll = neg_log_marginal_likelihood(data, params, factors)
        np.testing.assert_allclose(nll, 0.5 * math.log(2 * math.pi), rtol=1e-12)

    def test_duplicate_pair_matches_dense(self):
        space = SearchSpace.binary(2)
        betas = np.array([0.7, 0.3])
        factors = kernel_factors(space, betas)
        data = Dataset(((1, 0), (1, 0)), np.array([0.0, 0.0]))
        params = GpParams(0.0, 1.3, 0.2, betas)
        nll = neg_log_marginal_likelihood(data, params, factors)
        K = gram(factors, data.index_array(), data.index_array(),
                 params.signal_variance)
        want = reference.dense_gp_nll(K, data.values, params.mean,
                                      params.noise_variance)
        np.testing.assert_allclose(nll, want, rtol=1e-10)

    def test_shift_invariance(self):
        rng = np.random.default_rng(3)
        space = SearchSpace.categorical((3, 2, 4))
        betas = rng.uniform(0.1, 1.5, 3)
        factors = kernel_factors(space, betas)
        data = _random_dataset(space, rng, 9)
        params = GpParams(0.4, 1.1, 0.05, betas)
        shifted = Dataset(data.vertices, data.values + 17.5)
        params_shift = GpParams(params.mean + 17.5, 1.1, 0.05, betas)
        a = neg_log_marginal_likelihood(data, params, factors)
        b = neg_log_marginal_likelihood(shifted, params_shift, factors)
        np.testing.assert_allclose(a, b, rtol=1e-9)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(11)
        for trial in range(10):
            sizes = tuple(rng.integers(2, 5, size=rng.integers(1, 4)))
            space = SearchSpace.categorical(sizes)
            betas = rng.uniform(0.0, 2.0, len(sizes))
            factors = kernel_factors(space, betas)
            n = int(rng.integers(2, 12))
            data = _random_dataset(space, rng, n)
            params = GpParams(float(rng.normal()), float(rng.uniform(0.2, 3)),
                              float(rng.uniform(0.01, 0.5)), betas)
            got = neg_log_marginal_likelihood(data, params, factors)
            K = gram(factors, data.index_array(), data.index_array(),
                     params.signal_variance)
            want = reference.dense_gp_nll(K, data.values, params.mean,
                                          params.noise_variance)
            np.testing.assert_allclose(got, want, atol=1e-8, rtol=1e-8)

    def test_empty_rejected(self):
        space = SearchSpace.binary(1)
        factors = kernel_factors(space, np.zeros(1))
        data = Dataset((), np.zeros(0))
        params = GpParams(0.0, 1.0, 0.1, np.zeros(1))
        with pytest.raises(ValueError):
            neg_log_marginal_likelihood(data, params, factors)


class TestPredict:
    def test_noiseless_interpolation(self):
        rng = np.random.default_rng(5)
        space = SearchSpace.categorical((3, 2, 2))
        betas = np.array([0.5, 0.8, 0.2])
        factors = kernel_factors(space, betas)
        verts = list(space.enumerate_vertices())
        picks = rng.choice(len(verts), size=6, replace=False)
        data = Dataset(tuple(verts[i] for i in picks),
                       rng.standard_normal(6))
        params = GpParams(0.0, 1.0, 1e-12, betas)
        for v, y in zip(data.vertices, data.values):
            pred = predict(v, data, params, factors)
            assert abs(pred.mean - y) < 1e-4
            assert pred.variance < 1e-4

    def test_empty_data_prior(self):
        space = SearchSpace.categorical((3, 4))
        betas = np.array([0.9, 0.4])
        factors = kernel_factors(space, betas)
        data = Dataset((), np.zeros(0))
        params = GpParams(2.5, 1.7, 0.1, betas)
        v = (2, 3)
        pred = predict(v, data, params, factors)
        assert pred.mean == 2.5
        want = 1.7 * factors.factors[0][2, 2] * factors.factors[1][3, 3]
        np.testing.assert_allclose(pred.variance, want, rtol=1e-12)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(7)
        space = SearchSpace.categorical((3, 2, 2))
        betas = rng.uniform(0.1, 1.5, 3)
        factors = kernel_factors(space, betas)
        data = _random_dataset(space, rng, 8)
        params = GpParams(0.3, 1.4, 0.09, betas)
        X = data.index_array()
        K = gram(factors, X, X, params.signal_variance)
        for v in space.enumerate_vertices():
            vi = np.array([v])
            k_star = gram(factors, vi, X, params.signal_variance)[0]
            k_ss = gram(factors, vi, vi, params.signal_variance)[0, 0]
            want_mu, want_var = reference.dense_gp_predict(
                K, k_star, k_ss, data.values, params.mean,
                params.noise_variance)
            pred = predict(v, data, params, factors)
            np.testing.assert_allclose(pred.mean, want_mu, atol=1e-8)
            np.testing.assert_allclose(pred.variance, want_var, atol=1e-8)

    def test_variance_below_prior(self):
        rng = np.random.default_rng(13)
        for trial in range(5):
            sizes = tuple(rng.integers(2, 5, size=3))
            space = SearchSpace.categorical(sizes)
            betas = rng.uniform(0.0, 2.0, 3)
            factors = kernel_factors(space, betas)
            data = _random_dataset(space, rng, int(rng.integers(1, 10)))
            params = GpParams(0.0, float(rng.uniform(0.5, 2)),
                              float(rng.uniform(0.01, 0.3)), betas)
            for _ in range(10):
                v = space.random_vertex(rng)
                pred = predict(v, data, params, factors)
                prior = params.signal_variance * math.prod(
                    factors.factors[i][v[i], v[i]] for i in range(3))
                assert pred.variance <= prior + 1e-8

    def test_duplicate_observation_shrinks_variance(self):
        rng = np.random.default_rng(17)
        space = SearchSpace.categorical((4, 3))
        betas = np.array([0.6, 1.1])
        factors = kernel_factors(space, betas)
        data = _random_dataset(space, rng, 5)
        dup = data.append(data.vertices[2], float(data.values[2]))
        params = GpParams(0.1, 1.0, 0.2, betas)
        for v in space.enumerate_vertices():
            before = predict(v, data, params, factors).variance
            after = predict(v, dup, params, factors).variance
            assert after <= before + 1e-8

    def test_noise_at_residual_scale_preferred(self):
        # draws from the prior at a known noise level: the likelihood should
        # prefer that level to one a hundred times larger
        rng = np.random.default_rng(23)
        space = SearchSpace.categorical((3, 3, 2))
        betas = np.array([0.5, 0.9, 0.3])
        factors = kernel_factors(space, betas)
        true_sn2 = 0.05
        X = space.random_vertices(rng, 12)
        K = gram(factors, X, X, 1.0)
        wins = 0
        for _ in range(20):
            y = rng.multivariate_normal(np.zeros(12), K + true_sn2 * np.eye(12))
            data = Dataset(tuple(map(tuple, X.tolist())), y)
            good = GpParams(0.0, 1.0, true_sn2, betas)
            bad = GpParams(0.0, 1.0, 100 * true_sn2, betas)
            if (neg_log_marginal_likelihood(data, good, factors)
                    < neg_log_marginal_likelihood(data, bad, factors)):
                wins += 1
        assert wins >= 15

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(29)
        space = SearchSpace.categorical((3, 2, 4))
        betas = rng.uniform(0.2, 1.0, 3)
        factors = kernel_factors(space, betas)
        data = _random_dataset(space, rng, 7)
        params = GpParams(0.2, 0.9, 0.1, betas)
        post = GpPosterior(data, params, factors)
        X_star = space.random_vertices(rng, 9)
        mu, var = post.predict_batch(X_star)
        for j, v in enumerate(map(tuple, X_star.tolist())):
            pred = predict(v, data, params, factors)
            np.testing.assert_allclose(mu[j], pred.mean, rtol=1e-10)
            np.testing.assert_allclose(var[j], pred.variance, atol=1e-10)


class TestCholeskyJitter:
    def test_spd_no_jitter(self):
        rng = np.random.default_rng(31)
        A = rng.standard_normal((6, 6))
        S = A @ A.T + 6 * np.eye(6)
        L, jitter = cholesky_with_jitter(S)
        assert jitter == 0.0
        np.testing.assert_allclose(L @ L.T, S, atol=1e-10)

    def test_singular_gets_jitter(self):
        S = np.ones((4, 4))
        L, jitter = cholesky_with_jitter(S)
        assert jitter > 0.0
        assert np.all(np.isfinite(L))

    def test_indefinite_raises(self):
        S = np.array([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(NumericError):
            cholesky_with_jitter(S)
