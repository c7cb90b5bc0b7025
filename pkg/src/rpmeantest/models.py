"""Covariance matrices, eigenvalue spectra and shift vectors for the simulation study."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateVarianceError,
    DimensionMismatchError,
    InvalidDimensionError,
    NotPositiveDefiniteError,
)
from .sampling import as_generator, haar_orthogonal

DECAY_POWERS = {"slow": 6, "fast": 15}
SPECTRUM_LOW, SPECTRUM_HIGH = 0.01, 1.0
SPECTRUM_OFFSET = 0.001
SPECTRUM_FROBENIUS = 50.0


def build_spectrum(p: int, decay: str) -> np.ndarray:
    """Eigenvalues (descending) of the slow/fast decay covariance models.

    ``p`` equally spaced points on ``[0.01, 1]`` are raised to the power 6
    (slow) or 15 (fast), offset by ``0.001`` and rescaled so that the
    Euclidean norm of the spectrum is 50.
    """
    if p < 2:
        raise InvalidDimensionError(f"dimension must be >= 2, got {p}")
    try:
        power = DECAY_POWERS[decay]
    except KeyError:
        raise ValueError(f"decay must be one of {sorted(DECAY_POWERS)}, got {decay!r}") from None
    values = np.linspace(SPECTRUM_LOW, SPECTRUM_HIGH, p) ** power + SPECTRUM_OFFSET
    values *= SPECTRUM_FROBENIUS / np.linalg.norm(values)
    return values[::-1].copy()


def block_matrix(m: int, d: int, rho: float) -> np.ndarray:
    """Block-diagonal matrix of ``m`` equicorrelated ``d x d`` blocks."""
    block = (1.0 - rho) * np.eye(d) + rho * np.ones((d, d))
    return np.kron(np.eye(m), block)


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    """Recipe for a covariance matrix.

    Use the classmethod constructors rather than the raw fields.
    """

    kind: str
    dim: int
    decay: str | None = None
    m: int | None = None
    d: int | None = None
    rho: float | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)
    factor: np.ndarray | None = field(default=None, repr=False)

    KINDS = ("diagonal", "random", "block", "identity", "explicit", "low_rank")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown covariance kind {self.kind!r}")
        if self.dim < 1:
            raise InvalidDimensionError(f"dimension must be positive, got {self.dim}")
        if self.kind in ("diagonal", "random"):
            if self.decay not in DECAY_POWERS:
                raise ValueError(f"decay must be 'slow' or 'fast', got {self.decay!r}")
            if self.dim < 2:
                raise InvalidDimensionError("decay spectra need p >= 2")
        elif self.kind == "block":
            if self.m * self.d != self.dim:
                raise InvalidDimensionError(f"block model needs m*d = p, got {self.m}*{self.d} != {self.dim}")
            lower = -1.0 / (self.d - 1) if self.d > 1 else -math.inf
            if not lower < self.rho < 1.0:
                raise NotPositiveDefiniteError(f"rho={self.rho} outside ({lower}, 1)")

    @classmethod
    def diagonal_decay(cls, p, decay):
        return cls("diagonal", p, decay=decay)

    @classmethod
    def random_ortho_decay(cls, p, decay):
        return cls("random", p, decay=decay)

    @classmethod
    def block(cls, m=40, d=5, rho=0.8):
        return cls("block", m * d, m=m, d=d, rho=rho)

    @classmethod
    def identity(cls, p):
        return cls("identity", p)

    @classmethod
    def explicit(cls, matrix):
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"covariance must be square, got shape {matrix.shape}")
        return cls("explicit", matrix.shape[0], matrix=matrix)

    @classmethod
    def identity_plus_low_rank(cls, V):
        V = np.array(V, dtype=float)
        if V.ndim == 1:
            V = V[:, None]
        return cls("low_rank", V.shape[0], factor=V)

    @property
    def is_random(self) -> bool:
        return self.kind == "random"

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim}
        if self.decay is not None:
            out["decay"] = self.decay
        if self.kind == "block":
            out.update(m=self.m, d=self.d, rho=self.rho)
        if self.matrix is not None:
            out["matrix"] = self.matrix.tolist()
        if self.factor is not None:
            out["factor"] = self.factor.tolist()
        return out

    @classmethod
    def from_dict(cls, spec: dict) -> "CovarianceModel":
        kind = spec["kind"]
        if kind == "diagonal":
            return cls.diagonal_decay(spec["dim"], spec["decay"])
        if kind == "random":
            return cls.random_ortho_decay(spec["dim"], spec["decay"])
        if kind == "block":
            return cls.block(spec.get("m", 40), spec.get("d", 5), spec.get("rho", 0.8))
        if kind == "identity":
            return cls.identity(spec["dim"])
        if kind == "explicit":
            return cls.explicit(spec["matrix"])
        if kind == "low_rank":
            return cls.identity_plus_low_rank(spec["factor"])
        raise ValueError(f"unknown covariance kind {kind!r}")


@dataclass(frozen=True, eq=False)
class RealizedCovariance:
    """A concrete covariance matrix together with a square-root factor.

    ``sqrt_factor @ sqrt_factor.T`` reproduces ``sigma``; ``spectrum`` is sorted
    in descending order.
    """

    sigma: np.ndarray
    sqrt_factor: np.ndarray
    spectrum: np.ndarray

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]

    @cached_property
    def diag(self) -> np.ndarray:
        return np.diag(self.sigma).copy()

    @cached_property
    def correlation(self) -> np.ndarray:
        scale = 1.0 / np.sqrt(self.diag)
        R = self.sigma * np.outer(scale, scale)
        np.fill_diagonal(R, 1.0)
        return R

    @property
    def trace(self) -> float:
        return float(np.trace(self.sigma))

    @property
    def frobenius(self) -> float:
        return float(np.linalg.norm(self.sigma))

    @property
    def lambda_min(self) -> float:
        return float(self.spectrum[-1])

    @property
    def lambda_max(self) -> float:
        return float(self.spectrum[0])

    def to_csv(self, path) -> None:
        """Dense row-major CSV with a ``p=<dim>`` header line."""
        lines = [f"p={self.dim}"]
        lines += [",".join(repr(float(x)) for x in row) for row in self.sigma]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_csv(cls, path) -> "RealizedCovariance":
        text = Path(path).read_text(encoding="utf-8").splitlines()
        if not text or not text[0].startswith("p="):
            raise ValueError("covariance CSV must start with a 'p=<dim>' header")
        p = int(text[0][2:])
        sigma = np.array([[float(x) for x in line.split(",")] for line in text[1:] if line.strip()])
        if sigma.shape != (p, p):
            raise DimensionMismatchError(f"header says p={p} but matrix has shape {sigma.shape}")
        return _from_dense(sigma)


def _from_dense(sigma: np.ndarray) -> RealizedCovariance:
    if not np.allclose(sigma, sigma.T, rtol=1e-12, atol=1e-12 * np.abs(sigma).max()):
        raise NotPositiveDefiniteError("covariance matrix is not symmetric")
    sigma = 0.5 * (sigma + sigma.T)
    evals, evecs = np.linalg.eigh(sigma)
    if evals[0] <= 0:
        raise NotPositiveDefiniteError(f"smallest eigenvalue {evals[0]:.3g} is not positive")
    sqrt_factor = (evecs * np.sqrt(evals)) @ evecs.T
    return RealizedCovariance(sigma, sqrt_factor, evals[::-1].copy())


def realize_covariance(model: CovarianceModel, rng=None) -> RealizedCovariance:
    """Materialize ``model``; random models draw a fresh Haar eigenbasis per call."""
    p = model.dim
    if model.kind == "identity":
        return RealizedCovariance(np.eye(p), np.eye(p), np.ones(p))
    if model.kind == "diagonal":
        lam = build_spectrum(p, model.decay)
        return RealizedCovariance(np.diag(lam), np.diag(np.sqrt(lam)), lam)
    if model.kind == "random":
        lam = build_spectrum(p, model.decay)
        U = haar_orthogonal(p, as_generator(rng))
        factor = U * np.sqrt(lam)
        sigma = (U * lam) @ U.T
        sigma = 0.5 * (sigma + sigma.T)
        return RealizedCovariance(sigma, factor, lam)
    if model.kind == "block":
        return _from_dense(block_matrix(model.m, model.d, model.rho))
    if model.kind == "explicit":
        return _from_dense(model.matrix)
    if model.kind == "low_rank":
        V = model.factor
        return _from_dense(np.eye(p) + V @ V.T)
    raise ValueError(f"unknown covariance kind {model.kind!r}")


@dataclass(frozen=True)
class ShiftModel:
    """Recipe for the mean shift ``delta = mu1 - mu2``.

    kinds:
      * ``zero``
      * ``uniform``: ``scale * Z / |Z|``
      * ``tilted`` with ``rule='norm'``: ``scale * S Z / |S Z|``
      * ``tilted`` with ``rule='trace'``: a ``N(0, s Sigma)`` draw with
        ``s = sqrt(tr Sigma) / 2`` (``scale`` multiplies the result)
      * ``explicit``: the fixed vector ``vector``
    """

    kind: str = "zero"
    scale: float = 1.0
    rule: str = "norm"
    vector: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("zero", "uniform", "tilted", "explicit"):
            raise ValueError(f"unknown shift kind {self.kind!r}")
        if self.kind != "zero" and not self.scale > 0:
            raise ValueError("shift scale must be strictly positive")
        if self.kind == "tilted" and self.rule not in ("norm", "trace"):
            raise ValueError(f"tilted rule must be 'norm' or 'trace', got {self.rule!r}")
        if self.kind == "explicit":
            if self.vector is None:
                raise ValueError("explicit shift needs a vector")
            object.__setattr__(self, "vector", tuple(float(x) for x in self.vector))

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def uniform(cls, scale=1.0):
        return cls("uniform", scale)

    @classmethod
    def tilted(cls, scale=2.0, rule="norm"):
        return cls("tilted", scale, rule)

    @classmethod
    def explicit(cls, vector):
        return cls("explicit", vector=tuple(vector))

    def scaled(self, factor: float) -> "ShiftModel":
        return ShiftModel(self.kind, self.scale * factor, self.rule, self.vector)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "scale": self.scale}
        if self.kind == "tilted":
            out["rule"] = self.rule
        if self.vector is not None:
            out["vector"] = list(self.vector)
        return out

    @classmethod
    def from_dict(cls, spec: dict) -> "ShiftModel":
        return cls(spec.get("kind", "zero"), spec.get("scale", 1.0), spec.get("rule", "norm"), spec.get("vector"))


def sample_shift(model: ShiftModel, cov: RealizedCovariance, rng=None) -> np.ndarray:
    p = cov.dim
    if model.kind == "zero":
        return np.zeros(p)
    if model.kind == "explicit":
        v = np.asarray(model.vector, dtype=float)
        if v.shape != (p,):
            raise DimensionMismatchError(f"shift has length {v.shape[0]} but covariance has dimension {p}")
        return model.scale * v
    gen = as_generator(rng)
    z = gen.standard_normal(p)
    if model.kind == "uniform":
        return model.scale * z / np.linalg.norm(z)
    w = cov.sqrt_factor @ z
    if model.rule == "norm":
        return model.scale * w / np.linalg.norm(w)
    s = math.sqrt(cov.trace) / 2.0
    return model.scale * math.sqrt(s) * w


@dataclass(frozen=True)
class CovarianceSummaries:
    """Quantities governing the RP-vs-CQ and RP-vs-SD efficiency comparisons."""

    cq_dim: float
    sd_unif: float
    sd_tilt: float

    def as_tuple(self):
        return (self.cq_dim, self.sd_unif, self.sd_tilt)


def covariance_summaries(cov: RealizedCovariance) -> CovarianceSummaries:
    diag = cov.diag
    if np.any(diag <= 0):
        bad = int(np.flatnonzero(diag <= 0)[0])
        raise DegenerateVarianceError(f"coordinate {bad} has non-positive variance")
    p = cov.dim
    R = cov.correlation
    fro_R = np.linalg.norm(R)
    cq_dim = cov.trace**2 / cov.frobenius**2
    sd_unif = (cov.trace / p) ** 2 * (np.sum(1.0 / diag) / fro_R) ** 2
    sd_tilt = np.trace(R) ** 2 / fro_R**2
    return CovarianceSummaries(float(cq_dim), float(sd_unif), float(sd_tilt))
