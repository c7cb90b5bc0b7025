"""
How hard is each covariance for the baselines?
==============================================

Three summaries of a covariance predict when the projection test beats the
baselines: an effective dimension for CQ and two for SD, one under a
uniform shift and one under a shift tilted toward high-variance coordinates.
Small values favor the baselines.
"""
import numpy as np

from rpmeantest import CovarianceModel, build_spectrum, covariance_summaries, realize_covariance, table1_report

# the two eigenvalue profiles shared by the diagonal and rotated models
for decay in ("fast", "slow"):
    lam = build_spectrum(200, decay)
    print(f"{decay:4s} decay: {np.sum(lam > lam.max() / 10)} eigenvalues within a factor 10 of the largest")

# one rotated draw
cov = realize_covariance(CovarianceModel.random_ortho_decay(200, "slow"), np.random.default_rng(3))
print(covariance_summaries(cov))

# the full table, random covariances averaged over 100 draws
print(table1_report(100, np.random.default_rng(7)))
