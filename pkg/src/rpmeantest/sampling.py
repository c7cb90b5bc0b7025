"""Seeded random number generation.

Every random quantity in the package is drawn from a :class:`numpy.random.Generator`.
Functions accept either a generator, an :class:`RngStream`, an integer seed or
``None`` for the ``rng`` argument.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatchError, InvalidProjectionError

_MASK64 = (1 << 64) - 1


def stream_key(*parts) -> int:
    """Deterministic 64-bit id derived from an arbitrary tuple of labels."""
    text = "\x1f".join(repr(part) for part in parts)
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by ``(master_seed, stream_id)``.

    Two streams with the same pair produce bit-identical sequences; distinct
    pairs map to independent :class:`numpy.random.SeedSequence` spawn keys.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & _MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & _MASK64)

    def derive(self, *parts) -> "RngStream":
        """Child stream keyed by ``parts`` (e.g. experiment, replication, role)."""
        return RngStream(self.master_seed, stream_key(self.stream_id, *parts))

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))


def as_generator(rng=None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return np.random.default_rng(rng)


def thin_qr(G: np.ndarray) -> np.ndarray:
    """Q factor of a thin QR decomposition with ``diag(R) > 0``.

    Works on a single ``p x k`` matrix or a stack ``(..., p, k)``.
    """
    Q, R = np.linalg.qr(G)
    signs = np.sign(np.diagonal(R, axis1=-2, axis2=-1)).copy()
    signs[signs == 0] = 1.0
    return Q * signs[..., None, :]


def haar_orthogonal(p: int, rng=None) -> np.ndarray:
    """Haar-distributed ``p x p`` orthogonal matrix."""
    gen = as_generator(rng)
    return thin_qr(gen.standard_normal((p, p)))


@dataclass(frozen=True)
class ProjectionDraw:
    """A ``p x k`` Gaussian projection; ``Q`` is its orthonormal thin-QR factor."""

    G: np.ndarray

    @property
    def p(self) -> int:
        return self.G.shape[0]

    @property
    def k(self) -> int:
        return self.G.shape[1]

    @cached_property
    def Q(self) -> np.ndarray:
        return thin_qr(self.G)


def gaussian_projection(p: int, k: int, rng=None) -> ProjectionDraw:
    if not 1 <= k <= p:
        raise InvalidProjectionError(f"projection dimension k={k} must satisfy 1 <= k <= p={p}")
    gen = as_generator(rng)
    return ProjectionDraw(gen.standard_normal((p, k)))


def sample_mvn(mean, sqrt_factor, count: int, rng=None) -> np.ndarray:
    """Draw ``count`` rows ``mean + S z`` with ``z ~ N(0, I)``.

    Parameters
    ----------
    mean : array_like, shape (p,)
    sqrt_factor : array_like, shape (p, p)
        Any ``S`` with ``S S^T`` equal to the target covariance.
    count : int
    rng : Generator, RngStream, int or None
    """
    mean = np.asarray(mean, dtype=float)
    S = np.asarray(sqrt_factor, dtype=float)
    if count < 1:
        raise ValueError("count must be >= 1")
    if S.ndim != 2 or S.shape[0] != mean.shape[0]:
        raise DimensionMismatchError(f"mean has length {mean.shape[0]} but factor has shape {S.shape}")
    gen = as_generator(rng)
    Z = gen.standard_normal((count, S.shape[1]))
    return Z @ S.T + mean


def sample_white_wishart(k: int, n: int, rng=None, size: int | None = None) -> np.ndarray:
    """``Z^T Z`` for an ``n x k`` standard normal ``Z``; a stack if ``size`` is given."""
    if n < 1:
        raise ValueError("degrees of freedom n must be >= 1")
    gen = as_generator(rng)
    shape = (n, k) if size is None else (size, n, k)
    Z = gen.standard_normal(shape)
    return np.swapaxes(Z, -1, -2) @ Z
