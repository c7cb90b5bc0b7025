"""Asymptotic power functions, relative efficiencies and Monte Carlo oracles.

The projected divergence ``Delta_k = delta' P (P' Sigma P)^{-1} P' delta`` has
no closed-form average over projections for general ``Sigma``, so
:func:`delta_bar_k_mc` estimates it by Monte Carlo with a standard error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InvalidRatioError, MomentUndefinedError, UndefinedRatioError
from .models import CovarianceSummaries, RealizedCovariance, covariance_summaries
from .rp_test import projected_cholesky, projected_forms
from .sampling import as_generator, sample_white_wishart, thin_qr

MC_CHUNK = 64


def normal_cdf(x):
    return special.ndtr(x)


def normal_quantile(q):
    return special.ndtri(q)


@dataclass(frozen=True)
class PowerParams:
    alpha: float
    b: float
    y: float
    n: float
    delta_bar_k: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 < self.b < 1:
            raise ValueError("b must lie in (0, 1)")
        if not 0 < self.y < 1:
            raise InvalidRatioError("y must lie in (0, 1)")
        if self.delta_bar_k < 0:
            raise ValueError("delta_bar_k must be non-negative")


def power_rp(params: PowerParams) -> float:
    drift = params.b * (1 - params.b) * math.sqrt((1 - params.y) / (2 * params.y)) * params.delta_bar_k * math.sqrt(params.n)
    return float(normal_cdf(-normal_quantile(1 - params.alpha) + drift))


def power_cq(alpha, b, n, delta, cov: RealizedCovariance) -> float:
    delta = np.asarray(delta, dtype=float)
    drift = b * (1 - b) / math.sqrt(2) * float(delta @ delta) * n / cov.frobenius
    return float(normal_cdf(-normal_quantile(1 - alpha) + drift))


def _sd_drift_term(delta, cov):
    delta = np.asarray(delta, dtype=float)
    covariance_summaries(cov)  # raises on a degenerate diagonal
    return float(np.sum(delta**2 / cov.diag)) / float(np.linalg.norm(cov.correlation))


def power_sd(alpha, b, n, delta, cov: RealizedCovariance) -> float:
    drift = b * (1 - b) / math.sqrt(2) * _sd_drift_term(delta, cov) * n
    return float(normal_cdf(-normal_quantile(1 - alpha) + drift))


def _rp_efficacy(k, n, delta_bar_k):
    if not delta_bar_k > 0:
        raise UndefinedRatioError("ARE is undefined when delta_bar_k = 0")
    y = k / n
    if not 0 < y < 1:
        raise InvalidRatioError(f"k/n must lie in (0, 1), got {y}")
    return math.sqrt((1 - y) / y) * delta_bar_k * math.sqrt(n)


def are_cq_rp(delta, cov: RealizedCovariance, k, n, delta_bar_k) -> float:
    """ARE of CQ relative to RP; values below 1 favor RP."""
    delta = np.asarray(delta, dtype=float)
    cq = float(delta @ delta) * n / cov.frobenius
    return (cq / _rp_efficacy(k, n, delta_bar_k)) ** 2


def are_sd_rp(delta, cov: RealizedCovariance, k, n, delta_bar_k) -> float:
    """ARE of SD relative to RP; values below 1 favor RP."""
    sd = _sd_drift_term(delta, cov) * n
    return (sd / _rp_efficacy(k, n, delta_bar_k)) ** 2


def are_rp_vs_kstar(y, delta_bar_k, delta_bar_kstar) -> float:
    """ARE of RP at ratio ``y`` relative to RP at ``y* = 1/2``.

    If the projected divergence grows linearly in ``k`` this equals ``4y(1-y)``.
    """
    if not (0 < y < 1 and delta_bar_k > 0 and delta_bar_kstar > 0):
        raise ValueError("need 0 < y < 1 and positive divergences")
    ystar = 0.5
    num = (1 - y) / (2 * y) * delta_bar_k**2
    den = (1 - ystar) / (2 * ystar) * delta_bar_kstar**2
    return num / den


def delta_k(delta, cov: RealizedCovariance, Q) -> float:
    """Twice the KL divergence between the projected sampling distributions."""
    return float(projected_forms(delta, cov.sqrt_factor.T, Q))


@dataclass(frozen=True)
class MCEstimate:
    estimate: np.ndarray | float
    std_error: np.ndarray | float


def delta_bar_k_mc(delta, cov: RealizedCovariance, k: int, M: int = 2000, rng=None) -> MCEstimate:
    """Monte Carlo average of :func:`delta_k` over ``M`` Haar projections.

    ``delta`` may be a single shift (``p``) or a batch of shifts (``m x p``);
    every shift is evaluated on the same projection draws. Gaussian matrices
    stand in for their orthonormal factors (the forms are identical).
    """
    if M < 2:
        raise ValueError("need at least 2 projections for a standard error")
    D = np.atleast_2d(np.asarray(delta, dtype=float))
    p = cov.dim
    if k == p:
        exact = np.array([float(d @ np.linalg.solve(cov.sigma, d)) for d in D])
        est = exact if np.ndim(delta) > 1 else exact[0]
        return MCEstimate(est, np.zeros_like(exact) if np.ndim(delta) > 1 else 0.0)
    gen = as_generator(rng)
    F = cov.sqrt_factor.T
    total = np.zeros(D.shape[0])
    total_sq = np.zeros(D.shape[0])
    for start in range(0, M, MC_CHUNK):
        c = min(MC_CHUNK, M - start)
        G = gen.standard_normal((c, p, k))
        L = projected_cholesky(F @ G)
        B = np.einsum("mp,cpk->ckm", D, G)
        W = np.linalg.solve(L, B)
        vals = np.einsum("ckm,ckm->cm", W, W)
        total += vals.sum(axis=0)
        total_sq += (vals**2).sum(axis=0)
    mean = total / M
    var = np.maximum(total_sq / M - mean**2, 0.0) * M / (M - 1)
    se = np.sqrt(var / M)
    if np.ndim(delta) == 1:
        return MCEstimate(float(mean[0]), float(se[0]))
    return MCEstimate(mean, se)


@dataclass(frozen=True)
class AreReport:
    summaries: CovarianceSummaries
    n: int
    epsilon1: float
    c1: float
    sufficient_cq: bool
    sufficient_sd_unif: bool
    sufficient_sd_tilt: bool
    are_cq: float = math.nan
    are_sd: float = math.nan

    def to_dict(self) -> dict:
        return {
            "cq_dim": self.summaries.cq_dim,
            "sd_unif": self.summaries.sd_unif,
            "sd_tilt": self.summaries.sd_tilt,
            "n": self.n,
            "epsilon1": self.epsilon1,
            "c1": self.c1,
            "sufficient_cq": self.sufficient_cq,
            "sufficient_sd_unif": self.sufficient_sd_unif,
            "sufficient_sd_tilt": self.sufficient_sd_tilt,
            "are_cq": self.are_cq,
            "are_sd": self.are_sd,
        }


def sufficient_condition_report(cov: RealizedCovariance, n: int, epsilon1: float, margin: float = 0.01,
                                delta=None, delta_bar_k: float | None = None) -> AreReport:
    """Check the sample-size conditions under which RP beats CQ / SD in ARE.

    Each condition reads ``n >= c1 * quantity`` with ``c1 = 4 / epsilon1 * (1 + margin)``.
    When ``delta`` and ``delta_bar_k`` are supplied the realized AREs at
    ``k = floor(n / 2)`` are included.
    """
    if not epsilon1 > 0:
        raise ValueError("epsilon1 must be positive")
    s = covariance_summaries(cov)
    c1 = 4.0 / epsilon1 * (1.0 + margin)
    are_cq = are_sd = math.nan
    if delta is not None and delta_bar_k is not None:
        k = n // 2
        are_cq = are_cq_rp(delta, cov, k, n, delta_bar_k)
        are_sd = are_sd_rp(delta, cov, k, n, delta_bar_k)
    return AreReport(
        s, n, epsilon1, c1,
        sufficient_cq=bool(n >= c1 * s.cq_dim),
        sufficient_sd_unif=bool(n >= c1 * s.sd_unif),
        sufficient_sd_tilt=bool(n >= c1 * s.sd_tilt),
        are_cq=are_cq, are_sd=are_sd,
    )


@dataclass(frozen=True)
class TailBound:
    upper_threshold: float
    lower_threshold: float  # nan when t is outside the admissible range
    bound: float


def quadform_tail_bound(A, t: float, lower: bool = False) -> TailBound:
    """Concentration thresholds for ``Z'AZ / tr(A)`` with ``Z ~ N(0, I)``.

    ``P[Z'AZ/tr A >= upper_threshold] <= exp(-t^2/2)`` for any ``t > 0`` and
    ``P[Z'AZ/tr A <= lower_threshold] <= exp(-t^2/2)`` for
    ``0 < t < sqrt(tr A / |A|_op - 1)``. With ``lower=True`` an inadmissible
    ``t`` raises instead of reporting ``nan``.
    """
    A = np.asarray(A, dtype=float)
    evals = np.linalg.eigvalsh(A)
    op = float(evals[-1])
    if not op > 0:
        raise ValueError("A must have positive operator norm")
    if not t > 0:
        raise ValueError("t must be positive")
    ratio = op / float(evals.sum())
    upper = (1 + t * math.sqrt(ratio)) ** 2
    tmax = math.sqrt(max(1 / ratio - 1, 0.0))
    if t < tmax:
        low = (math.sqrt(1 - ratio) - t * math.sqrt(ratio)) ** 2
    elif lower:
        raise ValueError(f"t={t} outside the admissible range (0, {tmax:.6g}) for the lower bound")
    else:
        low = math.nan
    return TailBound(upper, low, math.exp(-t * t / 2))


@dataclass(frozen=True)
class ProjectedInverseReport:
    op_norm_estimate: float
    op_norm_se: float
    trace_estimate: float
    trace_se: float
    op_bound: float
    trace_bound: float


def projected_inverse_bounds_oracle(cov: RealizedCovariance, k: int, M: int = 5000, rng=None,
                                    batches: int = 20) -> ProjectedInverseReport:
    """Monte Carlo estimate of ``E_Q[Q (Q' Sigma Q)^{-1} Q']`` against its bounds.

    The operator norm is at most ``1 / lambda_min(Sigma)`` and the trace at
    least ``k p / tr(Sigma)``. The operator-norm standard error comes from
    ``batches`` independent batch means.
    """
    if M < 100:
        raise ValueError("need M >= 100 projections")
    gen = as_generator(rng)
    p = cov.dim
    per_batch = M // batches
    batch_means = []
    traces = []
    for _ in range(batches):
        acc = np.zeros((p, p))
        for start in range(0, per_batch, MC_CHUNK):
            c = min(MC_CHUNK, per_batch - start)
            Q = thin_qr(gen.standard_normal((c, p, k)))
            inner = np.swapaxes(Q, 1, 2) @ cov.sigma @ Q
            inv = np.linalg.inv(inner)
            acc += np.einsum("cpk,ckl,cql->pq", Q, inv, Q)
            traces.append(np.trace(inv, axis1=1, axis2=2))
        batch_means.append(acc / per_batch)
    total = sum(batch_means) / batches
    total = 0.5 * (total + total.T)
    ops = np.array([np.linalg.eigvalsh(0.5 * (b + b.T))[-1] for b in batch_means])
    traces = np.concatenate(traces)
    return ProjectedInverseReport(
        op_norm_estimate=float(np.linalg.eigvalsh(total)[-1]),
        op_norm_se=float(ops.std(ddof=1) / math.sqrt(batches)),
        trace_estimate=float(traces.mean()),
        trace_se=float(traces.std(ddof=1) / math.sqrt(traces.size)),
        op_bound=1.0 / cov.lambda_min,
        trace_bound=k * p / cov.trace,
    )


@dataclass(frozen=True)
class WishartMarginalReport:
    mean: float
    mean_se: float
    variance: float
    variance_se: float
    expected_mean: float
    expected_var: float


def inverse_wishart_marginal_oracle(k: int, n: int, draws: int = 20000, rng=None, u=None) -> WishartMarginalReport:
    """Moments of ``u' W^{-1} u`` for ``W ~ W_k(n, I)`` and a fixed unit ``u``.

    The exact law is ``1 / chi^2_{n-k+1}`` with mean ``1 / (n-k-1)`` and
    variance ``2 / ((n-k-1)^2 (n-k-3))``.
    """
    if n <= k + 3:
        raise MomentUndefinedError(f"variance of u'W^-1 u needs n > k + 3, got n={n}, k={k}")
    gen = as_generator(rng)
    if u is None:
        u = np.zeros(k)
        u[0] = 1.0
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    vals = []
    for start in range(0, draws, 1024):
        c = min(1024, draws - start)
        W = sample_white_wishart(k, n, gen, size=c)
        x = np.linalg.solve(W, np.broadcast_to(u, (c, k))[..., None])[..., 0]
        vals.append(x @ u)
    v = np.concatenate(vals)
    mean = float(v.mean())
    var = float(v.var(ddof=1))
    m4 = float(np.mean((v - mean) ** 4))
    return WishartMarginalReport(
        mean=mean,
        mean_se=math.sqrt(var / draws),
        variance=var,
        variance_se=math.sqrt(max(m4 - var**2, 0.0) / draws),
        expected_mean=1.0 / (n - k - 1),
        expected_var=2.0 / ((n - k - 1) ** 2 * (n - k - 3)),
    )
