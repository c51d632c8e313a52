"""Sampling estimates of expected losses, with standard errors."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameter
from .graph import LaplacianPair
from .loss import as_control, realized_losses
from .stochastic import CovarianceModel, LoadProfile, sample_fluctuations


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def _estimate(x: np.ndarray, seed: int) -> MCEstimate:
    # np.sum is pairwise and order-fixed, so the estimate is reproducible
    n = x.size
    mean = float(np.sum(x) / n)
    se = float(np.sqrt(np.sum((x - mean) ** 2) / (n - 1)) / np.sqrt(n))
    return MCEstimate(mean, se, n, seed)


def estimate_expected_loss(
    lp: LaplacianPair,
    cov: CovarianceModel,
    mu: LoadProfile | None,
    alpha,
    seed: int,
    n_samples: int,
    threads: int | None = None,
) -> MCEstimate:
    if n_samples < 2:
        raise InvalidParameter("n_samples must be at least 2")
    omega = sample_fluctuations(cov, seed, n_samples, threads)
    return _estimate(realized_losses(lp, mu, omega, as_control(alpha)), seed)


@dataclass(frozen=True)
class ControlComparison:
    """Per-control estimates plus differences against the first control."""

    estimates: list[MCEstimate]
    differences: list[MCEstimate]


def compare_controls(
    lp: LaplacianPair,
    cov: CovarianceModel,
    mu: LoadProfile | None,
    alphas: Sequence,
    seed: int,
    n_samples: int,
    threads: int | None = None,
) -> ControlComparison:
    """Evaluate every control on one shared fluctuation stream.

    ``differences[i]`` estimates ``E H(alphas[i]) - E H(alphas[0])``; using
    common random numbers keeps its standard error small.
    """
    if n_samples < 2:
        raise InvalidParameter("n_samples must be at least 2")
    controls = [as_control(a) for a in alphas]
    omega = sample_fluctuations(cov, seed, n_samples, threads)
    losses = [realized_losses(lp, mu, omega, a) for a in controls]
    return ControlComparison(
        [_estimate(x, seed) for x in losses],
        [_estimate(x - losses[0], seed) for x in losses],
    )
