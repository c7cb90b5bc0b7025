"""Competing high-dimensional mean tests: Bai-Saranadasa, Chen-Qin, Srivastava-Du.

Each function returns a :class:`~rpmeantest.rp_test.TestOutcome` whose
``statistic`` is the raw centered quantity and whose ``z_score`` is its
standardized, asymptotically N(0, 1) version under the null. Larger z means
more evidence against equal means.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateVarianceError
from .rp_test import TwoSampleData, centered_rows, normal_outcome

BASELINE_METHODS = ("bs", "cq", "sd")


def _params(data: TwoSampleData) -> dict:
    return dict(n1=data.n1, n2=data.n2, p=data.p)


def bs_statistic(data: TwoSampleData, alpha: float = 0.05):
    """Bai & Saranadasa (1996).

    ``M = |Xbar - Ybar|^2 - tau tr(S)`` with ``tau = (n1 + n2) / (n1 n2)``,
    standardized by ``tau * sqrt(2 (n + 1) / n) * B`` where
    ``B^2 = n^2 / ((n + 2)(n - 1)) * (tr(S^2) - tr(S)^2 / n)``.
    """
    n = data.n
    tau = 1.0 / data.scale
    C = centered_rows(data)
    d = data.X.mean(axis=0) - data.Y.mean(axis=0)
    # tr(S) and tr(S^2) through the n1+n2 Gram matrix, S = C^T C / n
    gram = C @ C.T / n
    tr_s = float(np.trace(gram))
    tr_s2 = float(np.sum(gram * gram))
    b2 = n**2 / ((n + 2) * (n - 1)) * (tr_s2 - tr_s**2 / n)
    if b2 <= 0:
        raise DegenerateVarianceError("pooled covariance has no spread; BS variance estimate is zero")
    m = float(d @ d) - tau * tr_s
    z = m / (tau * math.sqrt(2.0 * (n + 1) / n * b2))
    return normal_outcome(m, z, alpha, "bs", **_params(data))


def _leave_two_out_trace(K: np.ndarray) -> float:
    """Unbiased estimate of ``tr(Sigma^2)`` from the Gram matrix of one sample.

    Sums ``(X_j - Xbar_(j,k))' X_k (X_k - Xbar_(j,k))' X_j`` over ``j != k``,
    ``Xbar_(j,k)`` being the mean with observations j and k removed.
    """
    m = K.shape[0]
    total = K.sum(axis=0)  # total[k] = sum_i X_i' X_k
    diag = np.diag(K)
    # Xbar_(j,k)' X_k = (total[k] - K[j,k] - K[k,k]) / (m - 2)
    mean_dot_k = (total[None, :] - K - diag[None, :]) / (m - 2)
    a = K - mean_dot_k  # a[j,k] = (X_j - Xbar_(j,k))' X_k
    prod = a * a.T
    np.fill_diagonal(prod, 0.0)
    return float(prod.sum() / (m * (m - 1)))


def _leave_one_out_cross(X: np.ndarray, Y: np.ndarray) -> float:
    """Unbiased estimate of ``tr(Sigma1 Sigma2)``."""
    n1, n2 = X.shape[0], Y.shape[0]
    C = X @ Y.T
    col = C.sum(axis=0)  # col[k] = sum_l X_l' Y_k
    row = C.sum(axis=1)  # row[l] = sum_k X_l' Y_k
    # (X_l - Xbar_(l))' Y_k and (Y_k - Ybar_(k))' X_l
    a = C - (col[None, :] - C) / (n1 - 1)
    b = C - (row[:, None] - C) / (n2 - 1)
    return float(np.sum(a * b) / (n1 * n2))


def cq_statistic(data: TwoSampleData, alpha: float = 0.05):
    """Chen & Qin (2010).

    The U-statistic drops the self products ``X_i' X_i`` and ``Y_j' Y_j``::

        T = sum_{i!=j} X_i'X_j / (n1(n1-1)) + sum_{i!=j} Y_i'Y_j / (n2(n2-1))
            - 2 sum_{i,j} X_i'Y_j / (n1 n2)

    and is standardized by the leave-out trace estimators of its null variance.
    """
    X, Y = data.X, data.Y
    n1, n2 = data.n1, data.n2
    if min(n1, n2) < 4:
        raise DegenerateVarianceError("the CQ variance estimator needs at least 4 observations per sample")
    Kx = X @ X.T
    Ky = Y @ Y.T
    Kxy = X @ Y.T
    t = (
        (Kx.sum() - np.trace(Kx)) / (n1 * (n1 - 1))
        + (Ky.sum() - np.trace(Ky)) / (n2 * (n2 - 1))
        - 2.0 * Kxy.sum() / (n1 * n2)
    )
    tr1 = _leave_two_out_trace(Kx)
    tr2 = _leave_two_out_trace(Ky)
    tr12 = _leave_one_out_cross(X, Y)
    var = 2.0 / (n1 * (n1 - 1)) * tr1 + 2.0 / (n2 * (n2 - 1)) * tr2 + 4.0 / (n1 * n2) * tr12
    if not var > 0:
        raise DegenerateVarianceError("CQ variance estimate is not positive")
    return normal_outcome(t, t / math.sqrt(var), alpha, "cq", **_params(data))


def sd_statistic(data: TwoSampleData, alpha: float = 0.05, tiny: float = 1e-12):
    """Srivastava & Du (2008).

    ``(n1 n2 / (n1 + n2)) d' D^-1 d - n p / (n - 2)`` divided by
    ``sqrt(2 (tr(R^2) - p^2 / n) c)`` with ``c = 1 + tr(R^2) / p^1.5``, where
    ``D`` is the diagonal of the pooled covariance ``S`` and ``R`` the sample
    correlation matrix.
    """
    n, p = data.n, data.p
    C = centered_rows(data)
    var = np.einsum("ij,ij->j", C, C) / n
    vmax = var.max()
    small = np.flatnonzero(~(var > tiny * vmax)) if vmax > 0 else np.arange(p)
    if small.size:
        raise DegenerateVarianceError(f"coordinate {int(small[0])} has (near) zero sample variance")
    Cs = C / np.sqrt(var * n)
    gram = Cs @ Cs.T  # nonzero spectrum matches the sample correlation matrix
    tr_r2 = float(np.sum(gram * gram))
    d = data.X.mean(axis=0) - data.Y.mean(axis=0)
    num = data.scale * float(np.sum(d * d / var)) - n * p / (n - 2)
    c_pn = 1.0 + tr_r2 / p**1.5
    denom2 = 2.0 * (tr_r2 - p**2 / n) * c_pn
    if not denom2 > 0:
        raise DegenerateVarianceError("SD variance estimate is not positive")
    return normal_outcome(num, num / math.sqrt(denom2), alpha, "sd", **_params(data))


BASELINES = {"bs": bs_statistic, "cq": cq_statistic, "sd": sd_statistic}
