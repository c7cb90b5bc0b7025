import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rpmeantest.errors import DimensionMismatchError, InvalidProjectionError
from rpmeantest.sampling import (
    RngStream,
    as_generator,
    gaussian_projection,
    haar_orthogonal,
    sample_mvn,
    sample_white_wishart,
    stream_key,
    thin_qr,
)


class TestStreams:
    def test_same_pair_same_output(self):
        a = RngStream(7, 3).generator().standard_normal(50)
        b = RngStream(7, 3).generator().standard_normal(50)
        np.testing.assert_array_equal(a, b)

    def test_distinct_pairs_differ(self):
        base = RngStream(7, 3).generator().standard_normal(50)
        assert not np.array_equal(base, RngStream(7, 4).generator().standard_normal(50))
        assert not np.array_equal(base, RngStream(8, 3).generator().standard_normal(50))

    def test_derive_is_deterministic(self):
        s = RngStream(1)
        assert s.derive("a", 2) == s.derive("a", 2)
        assert s.derive("a", 2) != s.derive("a", 3)
        assert s.derive("a").derive(2) != s.derive("a", 2)

    def test_stream_key_u64(self):
        assert 0 <= stream_key("x", 1, 2.5) < 2**64

    def test_seed_wraps_to_u64(self):
        assert RngStream(2**64 + 5).master_seed == 5

    def test_derived_streams_uncorrelated(self):
        root = RngStream(11)
        a = root.derive("null", 0).generator().standard_normal(20000)
        b = root.derive("null", 1).generator().standard_normal(20000)
        assert abs(np.corrcoef(a, b)[0, 1]) < 4 / math.sqrt(20000)

    def test_as_generator_variants(self):
        g = np.random.default_rng(0)
        assert as_generator(g) is g
        assert isinstance(as_generator(RngStream(1)), np.random.Generator)
        np.testing.assert_array_equal(as_generator(5).random(3), np.random.default_rng(5).random(3))


class TestThinQR:
    def test_square_orthogonal(self):
        Q = gaussian_projection(5, 5, 0).Q
        np.testing.assert_allclose(Q @ Q.T, np.eye(5), atol=1e-10)

    def test_positive_diagonal_convention(self):
        G = np.random.default_rng(2).standard_normal((30, 7))
        Q = thin_qr(G)
        R = Q.T @ G
        assert np.all(np.diag(R) > 0)
        np.testing.assert_allclose(np.tril(R, -1), 0, atol=1e-10)

    def test_stack_matches_single(self):
        G = np.random.default_rng(3).standard_normal((4, 12, 5))
        stacked = thin_qr(G)
        for i in range(4):
            np.testing.assert_allclose(stacked[i], thin_qr(G[i]), atol=1e-13)

    def test_full_rank_typical(self):
        draw = gaussian_projection(200, 49, 0)
        assert np.linalg.matrix_rank(draw.G) == 49
        np.testing.assert_allclose(draw.Q.T @ draw.Q, np.eye(49), atol=1e-10)

    def test_k_too_large(self):
        with pytest.raises(InvalidProjectionError):
            gaussian_projection(3, 4)
        with pytest.raises(InvalidProjectionError):
            gaussian_projection(3, 0)

    @settings(max_examples=60, deadline=None)
    @given(
        p=st.integers(2, 25),
        data=st.data(),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_projection_identity(self, p, data, seed):
        # d'G(G'SG)^-1G'd == d'Q(Q'SQ)^-1Q'd for any full-rank G
        k = data.draw(st.integers(1, p))
        gen = np.random.default_rng(seed)
        A = gen.standard_normal((p, p + 2))
        S = A @ A.T / (p + 2) + 1e-2 * np.eye(p)
        d = gen.standard_normal(p)
        G = gen.standard_normal((p, k))
        Q = thin_qr(G)
        lhs = d @ G @ np.linalg.solve(G.T @ S @ G, G.T @ d)
        rhs = d @ Q @ np.linalg.solve(Q.T @ S @ Q, Q.T @ d)
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-12)


class TestHaar:
    def test_mean_projector(self):
        # E[QQ'] = (k/p) I for Haar Q; 10^4 draws at p=200, k=49
        p, k, draws, chunk = 200, 49, 10_000, 100
        gen = np.random.default_rng(2024)
        s1 = np.zeros((p, p))
        s2 = np.zeros((p, p))
        for _ in range(draws // chunk):
            Q = thin_qr(gen.standard_normal((chunk, p, k)))
            P = Q @ np.swapaxes(Q, 1, 2)
            s1 += P.sum(axis=0)
            s2 += np.einsum("cij,cij->ij", P, P)
        mean = s1 / draws
        se = np.sqrt((s2 / draws - mean**2) / draws)
        z = (mean - (k / p) * np.eye(p)) / se
        iu = np.triu_indices(p)
        # 20100 distinct entries: 3-SE band per entry, Bonferroni guard on the worst one
        assert np.mean(np.abs(z[iu]) > 3) < 0.01
        assert np.max(np.abs(z[iu])) < 5.5
        assert abs(np.trace(mean) - k) < 1e-8

    def test_orthogonal_invariance_moments(self):
        p, k, draws = 6, 3, 10_000
        gen = np.random.default_rng(1)
        U = haar_orthogonal(p, gen)
        Q = thin_qr(gen.standard_normal((draws, p, k)))
        UQ = U @ Q
        for arr in (Q, UQ):
            m = arr.mean(axis=0)
            assert np.max(np.abs(m) / (arr.std(axis=0) / math.sqrt(draws))) < 4.5
            sq = arr**2
            z = (sq.mean(axis=0) - 1 / p) / (sq.std(axis=0) / math.sqrt(draws))
            assert np.max(np.abs(z)) < 4.5

    def test_haar_orthogonal(self):
        U = haar_orthogonal(9, 0)
        np.testing.assert_allclose(U.T @ U, np.eye(9), atol=1e-12)


class TestMVN:
    def test_sample_covariance(self):
        X = sample_mvn(np.zeros(2), np.eye(2), 10_000, 0)
        assert np.linalg.norm(np.cov(X.T) - np.eye(2)) <= 0.05 * np.linalg.norm(np.eye(2))

    def test_zero_factor(self):
        mu = np.array([1.0, -2.0, 3.0])
        X = sample_mvn(mu, np.zeros((3, 3)), 5, 0)
        np.testing.assert_array_equal(X, np.tile(mu, (5, 1)))

    def test_deterministic(self):
        S = np.array([[2.0, 0.0], [0.5, 1.0]])
        a = sample_mvn([0, 1], S, 20, RngStream(9))
        b = sample_mvn([0, 1], S, 20, RngStream(9))
        np.testing.assert_array_equal(a, b)

    def test_factor_covariance(self):
        S = np.array([[2.0, 0.0], [0.5, 1.0]])
        X = sample_mvn([0, 0], S, 50_000, 1)
        np.testing.assert_allclose(np.cov(X.T), S @ S.T, atol=0.05)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            sample_mvn(np.zeros(3), np.eye(2), 4)

    def test_count(self):
        with pytest.raises(ValueError):
            sample_mvn(np.zeros(2), np.eye(2), 0)


class TestWishart:
    def test_chi_square_mean(self):
        draws = sample_white_wishart(1, 5, 0, size=100_000)[:, 0, 0]
        assert abs(draws.mean() - 5) <= 3 * draws.std() / math.sqrt(draws.size)

    def test_inverse_marginal_mean(self):
        k, n = 20, 60
        W = sample_white_wishart(k, n, 1, size=20_000)
        v = np.linalg.inv(W)[:, 0, 0]
        assert abs(v.mean() - 1 / 39) <= 3 * v.std(ddof=1) / math.sqrt(v.size)

    def test_psd_small(self):
        W = sample_white_wishart(2, 2, 3)
        np.testing.assert_allclose(W, W.T)
        assert np.linalg.det(W) >= 0
        assert np.linalg.eigvalsh(W).min() >= -1e-12

    def test_bad_df(self):
        with pytest.raises(ValueError):
            sample_white_wishart(2, 0)
