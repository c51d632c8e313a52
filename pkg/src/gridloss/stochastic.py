"""Covariance models for nodal load fluctuations and Gaussian sampling."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNoise, DimensionMismatch, InvalidParameter, NotPSD, NotSymmetric

# samples per RNG substream; a sample's stream depends only on (seed, index // CHUNK)
CHUNK = 8192


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    """Validated fluctuation covariance.

    ``stochastic_set`` holds the nodes whose row of ``sigma_matrix`` is not
    identically zero; ``total_variance`` is ``1' Sigma 1``.
    """

    sigma_matrix: np.ndarray
    stochastic_set: tuple[int, ...]
    total_variance: float
    _factor: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.sigma_matrix.shape[0]

    @property
    def row_sums(self) -> np.ndarray:
        return self.sigma_matrix.sum(axis=1)

    def scaled(self, delta: float) -> "CovarianceModel":
        return validate_covariance(delta * self.sigma_matrix)

    def factor(self) -> np.ndarray:
        """Symmetric square root ``F`` with ``F F' = Sigma``.

        Only the block on the stochastic set is factorized, so rows outside
        it are exactly zero.
        """
        if self._factor is None:
            S = np.array(self.stochastic_set)
            lam, V = np.linalg.eigh(self.sigma_matrix[np.ix_(S, S)])
            root = (V * np.sqrt(np.clip(lam, 0.0, None))) @ V.T
            F = np.zeros_like(self.sigma_matrix)
            F[np.ix_(S, S)] = root
            object.__setattr__(self, "_factor", F)
        return self._factor


def validate_covariance(raw, n: int | None = None) -> CovarianceModel:
    """Check symmetry and positive semi-definiteness and derive S and sigma^2.

    Invalid matrices are rejected, never repaired.
    """
    Sigma = np.array(raw, dtype=float)
    if Sigma.ndim != 2 or Sigma.shape[0] != Sigma.shape[1]:
        raise DimensionMismatch(f"covariance must be square, got shape {Sigma.shape}")
    if n is not None and Sigma.shape[0] != n:
        raise DimensionMismatch(f"covariance is {Sigma.shape[0]}x{Sigma.shape[0]}, graph has {n} nodes")
    if not np.all(np.isfinite(Sigma)):
        raise NotPSD("covariance has non-finite entries")
    scale = np.abs(Sigma).max()
    if np.abs(Sigma - Sigma.T).max() > 1e-10 * max(scale, 1e-300):
        raise NotSymmetric("covariance matrix is not symmetric")
    Sigma = 0.5 * (Sigma + Sigma.T)
    lam = np.linalg.eigvalsh(Sigma)
    if lam[0] < -1e-9 * max(lam[-1], 0.0) or (lam[-1] <= 0 and lam[0] < 0):
        raise NotPSD(f"covariance has negative eigenvalue {lam[0]:.3e}")
    S = tuple(int(i) for i in np.flatnonzero(np.any(Sigma != 0.0, axis=1)))
    sigma2 = float(Sigma.sum())
    if not S or not sigma2 > 0:
        raise DegenerateNoise(f"total variance 1'Sigma1 = {sigma2:g} must be positive")
    return CovarianceModel(Sigma, S, sigma2)


def iid_covariance(n: int, variance: float) -> CovarianceModel:
    if n < 2:
        raise InvalidParameter(f"need n >= 2, got {n}")
    if not variance > 0:
        raise InvalidParameter(f"variance must be positive, got {variance}")
    return validate_covariance(variance * np.eye(n))


@dataclass(frozen=True, eq=False)
class LoadProfile:
    """Nominal injections ``mu``; must be balanced (``1' mu = 0``)."""

    mu: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        if mu.ndim != 1:
            raise DimensionMismatch("load profile must be a vector")
        if abs(mu.sum()) > 1e-9 * (1.0 + np.abs(mu).sum()):
            raise InvalidParameter(f"load profile is unbalanced: 1'mu = {mu.sum():g}")
        object.__setattr__(self, "mu", mu)

    @classmethod
    def zeros(cls, n: int) -> "LoadProfile":
        return cls(np.zeros(n))

    @property
    def n(self) -> int:
        return self.mu.size


def _chunk(F: np.ndarray, S: np.ndarray, seed: int, c: int, size: int) -> np.ndarray:
    rng = np.random.default_rng([seed, c])
    z = rng.standard_normal((size, S.size))
    out = np.zeros((size, F.shape[0]))
    out[:, S] = z @ F[np.ix_(S, S)].T
    return out


def sample_fluctuations(cov: CovarianceModel, seed: int, count: int, threads: int | None = None) -> np.ndarray:
    """Draw ``count`` zero-mean Gaussian fluctuation vectors, one per row.

    Sample ``i`` comes from the substream ``(seed, i // CHUNK)``, so the output
    does not depend on ``threads`` and a longer run extends a shorter one.
    Entries of nodes outside the stochastic set are exactly zero.
    """
    if count < 0:
        raise InvalidParameter("count must be non-negative")
    F = cov.factor()
    S = np.array(cov.stochastic_set)
    sizes = [min(CHUNK, count - c * CHUNK) for c in range(-(-count // CHUNK))]
    jobs = [(F, S, int(seed), c, s) for c, s in enumerate(sizes)]
    if threads and threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda a: _chunk(*a), jobs))
    else:
        parts = [_chunk(*a) for a in jobs]
    if not parts:
        return np.zeros((0, cov.n))
    return np.concatenate(parts, axis=0)
