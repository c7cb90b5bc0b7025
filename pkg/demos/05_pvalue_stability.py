"""
How many projections are enough?
================================

The test is randomized: the same data give a slightly different p-value for
every set of projections. Repeat the test on one fixed dataset and watch the
spread shrink as the projection count grows.
"""
import numpy as np

from rpmeantest import (
    CovarianceModel, ShiftModel, TwoSampleData, pvalue_stability, realize_covariance, sample_mvn, sample_shift,
)

gen = np.random.default_rng(5)
cov = realize_covariance(CovarianceModel.random_ortho_decay(200, "slow"), gen)
delta = sample_shift(ShiftModel.uniform(1.0), cov, gen)
data = TwoSampleData(sample_mvn(delta, cov.sqrt_factor, 50, gen), sample_mvn(np.zeros(200), cov.sqrt_factor, 50, gen))

res = pvalue_stability(data, [10, 100, 1000], repeats=30, rng=np.random.default_rng(6))
for N, s in res.summaries().items():
    print(f"N={N:5d}  p-value std {s['std']:.2e}  range [{s['min']:.4f}, {s['max']:.4f}]")
