"""Expected loss averaged over equal-share placements of k controllable nodes."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from . import kernels
from .errors import InvalidK
from .graph import LaplacianPair, WeightedGraph, build_laplacian, random_connected_graph
from .loss import ControlVector, stochastic_loss
from .stochastic import CovarianceModel, iid_covariance

ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class PlacementAverage:
    """``H_k = C1 + C2 / k``, optionally with the brute-force average."""

    k: int
    closed_form: float
    C1: float
    C2: float
    enumerated: float | None = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "closed_form": self.closed_form,
            "C1": self.C1,
            "C2": self.C2,
            "enumerated": self.enumerated,
        }


@dataclass(frozen=True)
class ScalingCurve:
    ratios: list[tuple[int, float]]
    gamma: float
    asymptote: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "ratios": [{"k": k, "ratio": r} for k, r in self.ratios],
            "gamma": self.gamma,
            "asymptote": {"constant": self.asymptote[0], "per_k": self.asymptote[1]},
        }


def placement_constants(lp: LaplacianPair, cov: CovarianceModel) -> tuple[float, float]:
    """Return ``(C1, C2)``.

    ``C1 = tr(Sigma L+)/2 - sigma^2 tr(L+) / (2n(n-1))`` and
    ``C2 = sigma^2 tr(L+) / (2(n-1))``.
    """
    n = lp.n
    trL = float(np.trace(lp.Lplus))
    trSL = float(np.sum(cov.sigma_matrix * lp.Lplus))
    s2 = cov.total_variance
    C2 = s2 * trL / (2.0 * (n - 1))
    C1 = 0.5 * trSL - C2 / n
    return C1, C2


def enumerate_placements(lp: LaplacianPair, cov: CovarianceModel, k: int) -> np.ndarray:
    """Expected stochastic loss of every equal-share placement of size ``k``.

    Ordered lexicographically by node subset.
    """
    n = lp.n
    if not 1 <= k <= n:
        raise InvalidK(f"k must lie in [1, {n}], got {k}")
    b = lp.Lplus @ cov.row_sums
    quad, lin = kernels.subset_quadratic_sums(lp.Lplus, b, k)
    const = 0.5 * float(np.sum(cov.sigma_matrix * lp.Lplus))
    return 0.5 * cov.total_variance * quad / k**2 - lin / k + const


def average_loss_k(
    lp: LaplacianPair,
    cov: CovarianceModel,
    k: int,
    cap: int = ENUMERATION_CAP,
) -> PlacementAverage:
    n = lp.n
    if not 1 <= k <= n:
        raise InvalidK(f"k must lie in [1, {n}], got {k}")
    C1, C2 = placement_constants(lp, cov)
    enumerated = None
    if comb(n, k) <= cap:
        enumerated = float(np.mean(enumerate_placements(lp, cov, k)))
    return PlacementAverage(k, C1 + C2 / k, C1, C2, enumerated)


def gamma_ratio(lp: LaplacianPair, cov: CovarianceModel) -> float:
    """Finite-n value of ``(n-1) tr(Sigma L+) / (sigma^2 tr(L+))``."""
    n = lp.n
    trSL = float(np.sum(cov.sigma_matrix * lp.Lplus))
    return (n - 1) * trSL / (cov.total_variance * float(np.trace(lp.Lplus)))


def scaling_curve(lp: LaplacianPair, cov: CovarianceModel, k_max: int) -> ScalingCurve:
    """Ratios ``H_k / H_1`` for ``k = 1..k_max`` from the closed form.

    For i.i.d. fluctuations the large-n limit is ``1/2 + 1/(2k)``.
    """
    n = lp.n
    if not 1 <= k_max <= n:
        raise InvalidK(f"k_max must lie in [1, {n}], got {k_max}")
    C1, C2 = placement_constants(lp, cov)
    H1 = C1 + C2
    ratios = [(k, (C1 + C2 / k) / H1) for k in range(1, k_max + 1)]
    g = gamma_ratio(lp, cov)
    asym = (1.0 / (1.0 + 1.0 / g) if g > 0 else 0.0, 1.0 / (1.0 + g))
    return ScalingCurve(ratios, g, asym)


def empirical_random_placement_trace(
    lp: LaplacianPair, cov: CovarianceModel, seed: int
) -> list[tuple[int, float]]:
    """Losses along one random nested chain B_1 < B_2 < ... < B_n.

    Nodes are added in a seeded random order; each B_k uses equal sharing.
    """
    n = lp.n
    order = np.random.default_rng(seed).permutation(n)
    return [
        (k, stochastic_loss(lp, cov, ControlVector.equal_share(n, order[:k])))
        for k in range(1, n + 1)
    ]


@dataclass(frozen=True)
class NonMonotoneWitness:
    """Equal-share placement where adding ``extra`` to ``nodes`` raises the loss."""

    graph: WeightedGraph
    nodes: tuple[int, ...]
    extra: int
    loss_before: float
    loss_after: float


def search_equal_share_witness(
    seed: int,
    n_range: tuple[int, int] = (4, 8),
    max_graphs: int = 2000,
) -> NonMonotoneWitness | None:
    """Random search for a graph where one more equal-share node hurts.

    Fluctuations are i.i.d. with unit variance. Returns the first witness
    found, or ``None`` after ``max_graphs`` graphs.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_graphs):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        g = random_connected_graph(n, p=float(rng.uniform(0.25, 0.7)), rng=rng)
        lp = build_laplacian(g)
        cov = iid_covariance(n, 1.0)
        for k in range(1, n):
            for B in combinations(range(n), k):
                before = stochastic_loss(lp, cov, ControlVector.equal_share(n, B))
                for v in range(n):
                    if v in B:
                        continue
                    after = stochastic_loss(lp, cov, ControlVector.equal_share(n, B + (v,)))
                    if after > before * (1 + 1e-9):
                        return NonMonotoneWitness(g, B, v, before, after)
    return None
