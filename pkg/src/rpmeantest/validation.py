"""Monte Carlo oracle suites behind ``rp-meantest validate``.

Each check returns a plain dict with at least ``name`` and ``passed`` so the
whole report serializes to JSON.
"""
from __future__ import annotations

import math

import numpy as np

from . import asymptotics as asy
from .models import (
    CovarianceModel,
    ShiftModel,
    build_spectrum,
    realize_covariance,
    sample_shift,
)
from .sampling import RngStream, as_generator

SUITES = ("lemmas", "wishart", "scaling")


def quadform_samples(A, draws: int, rng=None, chunk: int = 20000) -> np.ndarray:
    """Draws of ``Z'AZ`` using ``Z'AZ = sum_i lambda_i(A) g_i^2`` in distribution."""
    gen = as_generator(rng)
    lam = np.linalg.eigvalsh(np.asarray(A, dtype=float))
    out = np.empty(draws)
    for start in range(0, draws, chunk):
        c = min(chunk, draws - start)
        g = gen.standard_normal((c, lam.size))
        out[start:start + c] = (g * g) @ lam
    return out


def lemma_matrices(p: int = 200) -> dict:
    return {
        "identity_100": np.eye(100),
        "diag_fast": np.diag(build_spectrum(p, "fast")),
        "block": realize_covariance(CovarianceModel.block(p // 5, 5, 0.8)).sigma,
    }


def check_quadform_tails(draws: int = 100_000, ts=(0.5, 1.0, 2.0), rng=None) -> list[dict]:
    gen = as_generator(rng)
    checks = []
    for name, A in lemma_matrices().items():
        q = quadform_samples(A, draws, gen) / np.trace(A)
        for t in ts:
            tb = asy.quadform_tail_bound(A, t)
            sides = [("upper", np.mean(q >= tb.upper_threshold))]
            if not math.isnan(tb.lower_threshold):
                sides.append(("lower", np.mean(q <= tb.lower_threshold)))
            for side, frac in sides:
                se = math.sqrt(max(tb.bound * (1 - tb.bound), 1e-300) / draws)
                checks.append({
                    "name": f"quadform_tail[{name},t={t},{side}]",
                    "empirical_tail": float(frac),
                    "bound": tb.bound,
                    "se": se,
                    "passed": bool(frac <= tb.bound + 2 * se),
                })
    return checks


def check_projected_inverse(p: int = 50, k: int = 10, M: int = 5000, rng=None) -> list[dict]:
    gen = as_generator(rng)
    cov = realize_covariance(CovarianceModel.random_ortho_decay(p, "slow"), gen)
    rep = asy.projected_inverse_bounds_oracle(cov, k, M, gen)
    return [
        {
            "name": "projected_inverse_op_norm",
            "estimate": rep.op_norm_estimate,
            "se": rep.op_norm_se,
            "bound": rep.op_bound,
            "passed": bool(rep.op_norm_estimate <= rep.op_bound + 3 * rep.op_norm_se),
        },
        {
            "name": "projected_inverse_trace",
            "estimate": rep.trace_estimate,
            "se": rep.trace_se,
            "bound": rep.trace_bound,
            "passed": bool(rep.trace_estimate >= rep.trace_bound - 3 * rep.trace_se),
        },
    ]


def check_inverse_wishart(k: int = 20, n: int = 60, draws: int = 20000, rng=None) -> list[dict]:
    rep = asy.inverse_wishart_marginal_oracle(k, n, draws, rng)
    return [
        {
            "name": "inverse_wishart_mean",
            "estimate": rep.mean,
            "expected": rep.expected_mean,
            "se": rep.mean_se,
            "passed": bool(abs(rep.mean - rep.expected_mean) <= 3 * rep.mean_se),
        },
        {
            "name": "inverse_wishart_variance",
            "estimate": rep.variance,
            "expected": rep.expected_var,
            "se": rep.variance_se,
            "passed": bool(abs(rep.variance - rep.expected_var) <= 4 * rep.variance_se),
        },
    ]


def low_rank_factor(p: int = 200, support: int = 20, sq_norm: float = 10.0) -> np.ndarray:
    """Rank-one ``v`` supported on the first ``support`` coordinates with ``|v|^2 = sq_norm``."""
    v = np.zeros(p)
    v[:support] = math.sqrt(sq_norm / support)
    return v


def uniform_shift_ratios(p=200, k=49, M=2000, n_deltas=50, rng=None) -> np.ndarray:
    """``Delta_bar_k / |delta|^2`` for spherical shifts under ``Sigma = I + v v'``."""
    gen = as_generator(rng)
    cov = realize_covariance(CovarianceModel.identity_plus_low_rank(low_rank_factor(p)))
    deltas = np.array([sample_shift(ShiftModel.uniform(), cov, gen) for _ in range(n_deltas)])
    est = asy.delta_bar_k_mc(deltas, cov, k, M, gen)
    return est.estimate / np.sum(deltas**2, axis=1)


def tilted_shift_ratios(p=200, k=49, M=2000, n_deltas=50, rng=None) -> tuple[np.ndarray, float]:
    """``Delta_bar_k / |delta|^2`` for ``N(0, s Sigma)`` shifts, and the target ``k / tr(Sigma)``."""
    gen = as_generator(rng)
    cov = realize_covariance(CovarianceModel.random_ortho_decay(p, "slow"), gen)
    deltas = np.array([sample_shift(ShiftModel.tilted(1.0, "trace"), cov, gen) for _ in range(n_deltas)])
    est = asy.delta_bar_k_mc(deltas, cov, k, M, gen)
    return est.estimate / np.sum(deltas**2, axis=1), k / cov.trace


def check_scaling(p=200, k=49, M=2000, n_deltas=50, rng=None) -> list[dict]:
    gen = as_generator(rng)
    unif = uniform_shift_ratios(p, k, M, n_deltas, gen)
    tilt, target = tilted_shift_ratios(p, k, M, n_deltas, gen)
    ys = np.round(np.arange(0.1, 0.95, 0.1), 10)
    are = [asy.are_rp_vs_kstar(y, y, 0.5) for y in ys]
    return [
        {
            "name": "uniform_shift_scaling",
            "mean_ratio": float(unif.mean() / (k / p)),
            "max_rel_dev": float(np.max(np.abs(unif / (k / p) - 1))),
            "passed": bool(abs(unif.mean() / (k / p) - 1) <= 0.05),
        },
        {
            "name": "tilted_shift_scaling",
            "mean_ratio": float(tilt.mean() / target),
            "passed": bool(abs(tilt.mean() / target - 1) <= 0.10),
        },
        {
            "name": "projection_dimension_optimality",
            "are": [float(a) for a in are],
            "passed": bool(max(are) <= 1.05),
        },
    ]


def run_validation(suite: str = "all", seed: int = 0, scale: float = 1.0) -> dict:
    """Run one or all oracle suites. ``scale`` shrinks the Monte Carlo sizes."""
    suites = SUITES if suite == "all" else (suite,)
    root = RngStream(seed)
    checks = []
    for name in suites:
        gen = root.derive("validate", name).generator()
        if name == "lemmas":
            checks += check_quadform_tails(max(1000, int(100_000 * scale)), rng=gen)
            checks += check_projected_inverse(M=max(100, int(5000 * scale)), rng=gen)
        elif name == "wishart":
            checks += check_inverse_wishart(draws=max(500, int(20000 * scale)), rng=gen)
        elif name == "scaling":
            checks += check_scaling(M=max(20, int(2000 * scale)), n_deltas=max(5, int(50 * scale)), rng=gen)
        else:
            raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
    return {"suite": suite, "seed": seed, "passed": all(c["passed"] for c in checks), "checks": checks}
