"""
Predicted power and relative efficiency
=======================================

Large-sample power formulas for RP, CQ and SD on a fixed shift, and the
asymptotic relative efficiencies of the baselines against RP. The RP formula
needs the projected divergence averaged over Haar projections, estimated
here by Monte Carlo.
"""
import numpy as np

from rpmeantest import (
    CovarianceModel, PowerParams, ShiftModel, are_cq_rp, are_sd_rp, delta_bar_k_mc, power_cq, power_rp,
    power_sd, realize_covariance, sample_shift, sufficient_condition_report,
)

gen = np.random.default_rng(9)
n, alpha, b = 98, 0.05, 0.5
k = n // 2
for name, model in [("diagonal fast", CovarianceModel.diagonal_decay(200, "fast")),
                    ("rotated slow", CovarianceModel.random_ortho_decay(200, "slow"))]:
    cov = realize_covariance(model, gen)
    delta = sample_shift(ShiftModel.uniform(1.0), cov, gen)
    dbar = delta_bar_k_mc(delta, cov, k, 1000, gen)
    rp = power_rp(PowerParams(alpha, b, k / n, n, dbar.estimate))
    print(f"{name}: delta_bar_k {dbar.estimate:.3f} (SE {dbar.std_error:.1e})")
    print(f"  power  RP {rp:.3f}  CQ {power_cq(alpha, b, n, delta, cov):.3f}  SD {power_sd(alpha, b, n, delta, cov):.3f}")
    print(f"  ARE    CQ/RP {are_cq_rp(delta, cov, k, n, dbar.estimate):.3f}  SD/RP {are_sd_rp(delta, cov, k, n, dbar.estimate):.3f}")
    rep = sufficient_condition_report(cov, n, 0.5)
    print(f"  n >= c1 * summary?  CQ {rep.sufficient_cq}  SD uniform {rep.sufficient_sd_unif}  SD tilted {rep.sufficient_sd_tilt}")
