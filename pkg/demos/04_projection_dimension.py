"""
Choosing the projection dimension
=================================

Sweep k = y n over a grid of ratios on one setting. Very small k throws away
signal; k close to n leaves a badly conditioned projected covariance.
The middle of the range is close to the best.
"""
import sys

from rpmeantest import ExperimentConfig, sweep_projection_dimension

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 100
cfg = ExperimentConfig(8, reps_null=reps, reps_alt=reps, methods=("rp",), seed=2)
for y, curve in sweep_projection_dimension(cfg, [0.1, 0.3, 0.5, 0.7, 0.9]).items():
    print(f"y={y:.1f} k={int(y * cfg.n):2d}  AUC {curve.auc:.3f}")
