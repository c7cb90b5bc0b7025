import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rpmeantest.errors import (
    DegenerateVarianceError,
    DimensionMismatchError,
    InvalidDimensionError,
    NotPositiveDefiniteError,
)
from rpmeantest.models import (
    CovarianceModel,
    RealizedCovariance,
    ShiftModel,
    block_matrix,
    build_spectrum,
    covariance_summaries,
    realize_covariance,
    sample_shift,
)


def _count_above_tenth(lam):
    return int(np.sum(lam > lam.max() / 10))


class TestSpectrum:
    def test_fast_count(self):
        assert abs(_count_above_tenth(build_spectrum(200, "fast")) - 29) <= 1

    def test_slow_count(self):
        assert abs(_count_above_tenth(build_spectrum(200, "slow")) - 65) <= 1

    @pytest.mark.parametrize("decay", ["slow", "fast"])
    def test_frobenius_is_50(self, decay):
        assert np.linalg.norm(build_spectrum(200, decay)) == pytest.approx(50.0, rel=1e-10)

    def test_grid_endpoints_and_offset(self):
        lam = build_spectrum(7, "slow")
        base = np.linspace(0.01, 1.0, 7) ** 6 + 0.001
        c = lam[0] / base[-1]
        np.testing.assert_allclose(np.sort(lam), c * base, rtol=1e-12)

    def test_sorted_descending_positive(self):
        lam = build_spectrum(50, "fast")
        assert np.all(np.diff(lam) <= 0) and lam.min() > 0

    def test_too_small(self):
        with pytest.raises(InvalidDimensionError):
            build_spectrum(1, "slow")

    def test_bad_decay(self):
        with pytest.raises(ValueError):
            build_spectrum(10, "medium")


class TestBlock:
    def test_eigenvalues(self):
        m, d, rho = 40, 5, 0.8
        ev = np.sort(np.linalg.eigvalsh(block_matrix(m, d, rho)))
        expect = np.sort(np.r_[np.full(m, 1 - rho + rho * d), np.full(m * d - m, 1 - rho)])
        np.testing.assert_allclose(ev, expect, atol=1e-8)

    def test_rho_out_of_range(self):
        with pytest.raises(NotPositiveDefiniteError):
            CovarianceModel.block(4, 5, 1.0)
        with pytest.raises(NotPositiveDefiniteError):
            CovarianceModel.block(4, 5, -0.3)

    def test_dim_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            CovarianceModel("block", 21, m=4, d=5, rho=0.5)


class TestRealize:
    @pytest.mark.parametrize("model", [
        CovarianceModel.diagonal_decay(30, "slow"),
        CovarianceModel.random_ortho_decay(30, "fast"),
        CovarianceModel.block(6, 5, 0.8),
        CovarianceModel.identity(30),
        CovarianceModel.identity_plus_low_rank(np.linspace(0, 1, 30)),
    ], ids=lambda m: m.kind)
    def test_invariants(self, model):
        cov = realize_covariance(model, np.random.default_rng(0))
        S = cov.sqrt_factor
        assert np.linalg.norm(S @ S.T - cov.sigma) <= 1e-10 * np.linalg.norm(cov.sigma)
        np.testing.assert_allclose(np.diag(cov.correlation), 1.0, atol=1e-12)
        assert cov.spectrum.sum() == pytest.approx(np.trace(cov.sigma), rel=1e-8)
        np.testing.assert_allclose(cov.sigma, cov.sigma.T, atol=0)

    def test_random_keeps_spectrum(self):
        lam = build_spectrum(40, "slow")
        for seed in range(3):
            cov = realize_covariance(CovarianceModel.random_ortho_decay(40, "slow"), np.random.default_rng(seed))
            np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(cov.sigma))[::-1], lam, atol=1e-8)

    def test_random_fresh_per_call(self):
        gen = np.random.default_rng(1)
        m = CovarianceModel.random_ortho_decay(10, "slow")
        assert not np.allclose(realize_covariance(m, gen).sigma, realize_covariance(m, gen).sigma)

    def test_identity(self):
        cov = realize_covariance(CovarianceModel.identity(200))
        np.testing.assert_array_equal(cov.spectrum, np.ones(200))
        np.testing.assert_array_equal(cov.correlation, np.eye(200))
        np.testing.assert_array_equal(cov.diag, np.ones(200))

    def test_explicit_not_pd(self):
        with pytest.raises(NotPositiveDefiniteError):
            realize_covariance(CovarianceModel.explicit([[1.0, 2.0], [2.0, 1.0]]))

    def test_explicit_not_square(self):
        with pytest.raises(DimensionMismatchError):
            CovarianceModel.explicit(np.ones((2, 3)))

    def test_csv_round_trip(self, tmp_path):
        cov = realize_covariance(CovarianceModel.block(2, 3, 0.4))
        path = tmp_path / "sigma.csv"
        cov.to_csv(path)
        assert path.read_text().splitlines()[0] == "p=6"
        back = RealizedCovariance.from_csv(path)
        np.testing.assert_allclose(back.sigma, cov.sigma, rtol=1e-15)

    @pytest.mark.parametrize("model", [
        CovarianceModel.diagonal_decay(8, "fast"),
        CovarianceModel.block(2, 4, 0.3),
        CovarianceModel.explicit(np.eye(3) * 2),
        CovarianceModel.identity_plus_low_rank([1.0, 0.0, 2.0]),
    ], ids=lambda m: m.kind)
    def test_dict_round_trip(self, model):
        again = CovarianceModel.from_dict(model.to_dict())
        np.testing.assert_array_equal(realize_covariance(again).sigma, realize_covariance(model).sigma)


class TestShift:
    def setup_method(self):
        self.cov = realize_covariance(CovarianceModel.random_ortho_decay(50, "slow"), np.random.default_rng(3))

    def test_uniform_norm(self):
        d = sample_shift(ShiftModel.uniform(), self.cov, np.random.default_rng(0))
        assert np.linalg.norm(d) == pytest.approx(1.0, abs=1e-12)

    def test_tilted_norm(self):
        d = sample_shift(ShiftModel.tilted(2.0), self.cov, np.random.default_rng(0))
        assert np.linalg.norm(d) == pytest.approx(2.0, abs=1e-12)

    def test_zero(self):
        d = sample_shift(ShiftModel.zero(), self.cov)
        assert d @ np.linalg.solve(self.cov.sigma, d) == 0.0

    def test_trace_rule_variance(self):
        # N(0, s Sigma) with s = sqrt(tr Sigma)/2 has E|delta|^2 = s tr Sigma
        gen = np.random.default_rng(5)
        draws = np.array([sample_shift(ShiftModel.tilted(1.0, "trace"), self.cov, gen) for _ in range(4000)])
        s = math.sqrt(self.cov.trace) / 2
        sq = np.sum(draws**2, axis=1)
        target = s * self.cov.trace
        assert abs(sq.mean() - target) <= 4 * sq.std() / math.sqrt(sq.size)

    def test_tilted_aligns_with_top_eigvec(self):
        gen = np.random.default_rng(9)
        top = np.linalg.eigh(self.cov.sigma)[1][:, -1]
        tilt = np.mean([abs(sample_shift(ShiftModel.tilted(), self.cov, gen) @ top) / 2 for _ in range(300)])
        unif = np.mean([abs(sample_shift(ShiftModel.uniform(), self.cov, gen) @ top) for _ in range(300)])
        assert tilt > 2 * unif

    def test_explicit_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            sample_shift(ShiftModel.explicit([1.0, 2.0]), self.cov)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_nonpositive_scale(self, bad):
        with pytest.raises(ValueError):
            ShiftModel.uniform(bad)

    def test_dict_round_trip(self):
        for m in [ShiftModel.zero(), ShiftModel.uniform(3.0), ShiftModel.tilted(2.0, "trace"), ShiftModel.explicit([1, 2])]:
            assert ShiftModel.from_dict(m.to_dict()) == m


class TestSummaries:
    def test_block(self):
        s = covariance_summaries(realize_covariance(CovarianceModel.block()))
        assert s.cq_dim == pytest.approx(200**2 / ((1 + 0.64 * 4) * 200), rel=1e-10)
        assert [round(x) for x in s.as_tuple()] == [56, 56, 56]

    def test_diag_slow(self):
        s = covariance_summaries(realize_covariance(CovarianceModel.diagonal_decay(200, "slow")))
        assert round(s.cq_dim) == 54
        assert s.sd_tilt == pytest.approx(200, rel=1e-12)

    def test_diag_fast(self):
        s = covariance_summaries(realize_covariance(CovarianceModel.diagonal_decay(200, "fast")))
        assert round(s.cq_dim) == 25

    def test_identity(self):
        s = covariance_summaries(realize_covariance(CovarianceModel.identity(200)))
        np.testing.assert_allclose(s.as_tuple(), (200, 200, 200), rtol=1e-12)

    def test_zero_variance(self):
        cov = RealizedCovariance(np.diag([1.0, 0.0]), np.diag([1.0, 0.0]), np.array([1.0, 0.0]))
        with pytest.raises(DegenerateVarianceError):
            covariance_summaries(cov)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 12), st.integers(0, 2**32 - 1))
    def test_effective_dimension_bounds(self, p, seed):
        gen = np.random.default_rng(seed)
        A = gen.standard_normal((p, p + 1))
        cov = realize_covariance(CovarianceModel.explicit(A @ A.T + 1e-3 * np.eye(p)))
        eff = covariance_summaries(cov).cq_dim
        assert 1 - 1e-12 <= eff <= p + 1e-9
