"""Optimal load-sharing vectors.

Three routes to the same optimum:

* closed forms (:func:`optimize_subset`, :func:`optimize_full`),
* a reduced KKT solve for the penalized problem (:func:`optimize_penalized`),
* an independent full-dimension KKT assembly (:func:`kkt_oracle`) and a
  projected-gradient iteration (:func:`projected_gradient_oracle`) used to
  cross-check the other two.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .errors import (
    DegenerateNoise,
    FullSetRequested,
    InvalidPenalty,
    SingularKKT,
)
from .graph import LaplacianPair
from .loss import ControlVector, LossCoefficients, stochastic_loss
from .stochastic import CovarianceModel

KKT_TOL = 1e-8


@dataclass(frozen=True)
class ControllableSet:
    """Ordered set of controllable nodes."""

    nodes: tuple[int, ...]
    n: int

    def __post_init__(self):
        nodes = tuple(int(v) for v in self.nodes)
        if not nodes:
            raise ValueError("controllable set must contain at least one node")
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"duplicate nodes in controllable set {nodes}")
        if min(nodes) < 0 or max(nodes) >= self.n:
            raise IndexError(f"controllable set {nodes} out of range for n={self.n}")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def full(cls, n: int) -> "ControllableSet":
        return cls(tuple(range(n)), n)

    @property
    def k(self) -> int:
        return len(self.nodes)

    @property
    def is_full(self) -> bool:
        return self.k == self.n

    def mask(self) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[list(self.nodes)] = True
        return m

    def embed(self, x: np.ndarray) -> np.ndarray:
        a = np.zeros(self.n)
        a[list(self.nodes)] = x
        return a


def _as_set(B, n: int) -> ControllableSet:
    if B is None:
        return ControllableSet.full(n)
    if isinstance(B, ControllableSet):
        return B
    return ControllableSet(tuple(B), n)


@dataclass(frozen=True)
class PenaltyModel:
    """Usage penalty ``xi * (alpha' diag(P) alpha + q' alpha)``."""

    P_diag: np.ndarray
    q: np.ndarray
    xi: float

    def __post_init__(self):
        P = np.asarray(self.P_diag, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if P.ndim != 1 or q.shape != P.shape:
            raise InvalidPenalty("P_diag and q must be vectors of equal length")
        if np.any(~(P > 0)):
            raise InvalidPenalty("P_diag entries must be positive")
        if np.any(~(q >= 0)):
            raise InvalidPenalty("q entries must be non-negative")
        if not (np.isfinite(self.xi) and self.xi >= 0):
            raise InvalidPenalty(f"xi must be non-negative, got {self.xi}")
        object.__setattr__(self, "P_diag", P)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "xi", float(self.xi))

    @property
    def n(self) -> int:
        return self.P_diag.size

    def value(self, alpha: np.ndarray) -> float:
        return float(self.xi * (alpha @ (self.P_diag * alpha) + self.q @ alpha))


@dataclass(frozen=True)
class OptimalControl:
    alpha_star: ControlVector
    lagrange_multiplier: float
    objective_value: float
    penalized_objective: float | None = None

    def to_dict(self) -> dict:
        d = {
            "alpha": self.alpha_star.alpha.tolist(),
            "support": list(self.alpha_star.support),
            "gamma": self.lagrange_multiplier,
            "objective": self.objective_value,
        }
        if self.penalized_objective is not None:
            d["penalized_objective"] = self.penalized_objective
        return d


def interpretation_weights(cov: CovarianceModel) -> np.ndarray:
    """Share of each node in the variance of the total mismatch, ``Sigma 1 / sigma^2``."""
    if not cov.total_variance > 0:
        raise DegenerateNoise("total variance must be positive")
    return cov.row_sums / cov.total_variance


def _finish(lp, cov, Bset, x, gamma, H_B, b_B, penalized=None) -> OptimalControl:
    # absorb rounding drift in 1'x without disturbing exact zeros
    w = np.abs(x)
    x = x + (1.0 - x.sum()) * w / w.sum()
    resid = np.abs(H_B @ x - gamma - b_B).max()
    scale = 1.0 + np.abs(b_B).max() + abs(gamma)
    assert resid <= KKT_TOL * scale, f"KKT residual {resid:.3e}"
    alpha = ControlVector(Bset.embed(x), Bset.nodes)
    return OptimalControl(alpha, float(gamma), stochastic_loss(lp, cov, alpha), penalized)


def optimize_subset(lp: LaplacianPair, cov: CovarianceModel, B) -> OptimalControl:
    """Optimal sharing among the ``k < n`` nodes of ``B`` (closed form).

    With ``M = inv(L+_B)`` (principal submatrix of ``L+``) and
    ``t = 1'M1``::

        alpha_B = M1/t + (I - M J / t) M P_B' L+ Sigma1 / sigma^2

    and zero elsewhere. If every stochastic node is controllable this
    reduces to ``Sigma1 / sigma^2``.
    """
    Bset = _as_set(B, lp.n)
    if Bset.is_full:
        raise FullSetRequested("B = V: use optimize_full")
    idx = np.array(Bset.nodes)
    sigma2 = cov.total_variance
    LB = lp.Lplus[np.ix_(idx, idx)]
    # L+_B is positive definite for connected graphs and k < n
    chol = np.linalg.cholesky(LB)

    def solve(r):
        return np.linalg.solve(chol.T, np.linalg.solve(chol, r))

    ones = np.ones(idx.size)
    M1 = solve(ones)
    t = ones @ M1
    assert t > 0
    b = (lp.Lplus @ cov.row_sums)[idx]
    Mb = solve(b / sigma2)
    x = M1 / t + Mb - M1 * (ones @ Mb) / t
    gamma = (sigma2 - ones @ solve(b)) / t
    return _finish(lp, cov, Bset, x, gamma, sigma2 * LB, b)


def optimize_full(lp: LaplacianPair, cov: CovarianceModel) -> OptimalControl:
    """Optimal sharing when every node is controllable: ``Sigma1 / sigma^2``.

    Independent of the graph; the multiplier is zero.
    """
    x = interpretation_weights(cov)
    Bset = ControllableSet.full(lp.n)
    b = lp.Lplus @ cov.row_sums
    return _finish(lp, cov, Bset, x, 0.0, cov.total_variance * lp.Lplus, b)


def optimize(lp: LaplacianPair, cov: CovarianceModel, B=None) -> OptimalControl:
    """Dispatch to :func:`optimize_full` or :func:`optimize_subset`."""
    Bset = _as_set(B, lp.n)
    if Bset.is_full:
        return optimize_full(lp, cov)
    return optimize_subset(lp, cov, Bset)


def optimize_penalized(
    lp: LaplacianPair,
    cov: CovarianceModel,
    pen: PenaltyModel,
    B=None,
) -> OptimalControl:
    """Minimize expected loss plus ``xi (a'Pa + q'a)`` by a direct KKT solve.

    The stationarity system on ``B`` is
    ``(sigma^2 L+_B + 2 xi P_B) a - gamma 1 = b_B - xi q_B``, ``1'a = 1``.
    """
    if pen.n != lp.n:
        raise InvalidPenalty(f"penalty has dimension {pen.n}, graph has {lp.n} nodes")
    Bset = _as_set(B, lp.n)
    idx = np.array(Bset.nodes)
    k = idx.size
    sigma2 = cov.total_variance
    H = sigma2 * lp.Lplus[np.ix_(idx, idx)] + 2.0 * pen.xi * np.diag(pen.P_diag[idx])
    g = (lp.Lplus @ cov.row_sums)[idx] - pen.xi * pen.q[idx]
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = H
    K[:k, k] = -1.0
    K[k, :k] = 1.0
    rhs = np.append(g, 1.0)
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularKKT(str(exc)) from exc
    x, gamma = sol[:k], sol[k]
    res = _finish(lp, cov, Bset, x, gamma, H, g)
    a = res.alpha_star.alpha
    return OptimalControl(
        res.alpha_star, res.lagrange_multiplier, res.objective_value,
        res.objective_value + pen.value(a),
    )


def kkt_oracle(coeffs: LossCoefficients, pen: PenaltyModel | None, B) -> ControlVector:
    """Solve the equality-constrained QP over all ``n`` coordinates.

    Constraints ``1'a = 1`` and ``a_v = 0`` for ``v`` outside ``B`` are kept as
    explicit rows of the KKT matrix; no closed form is used.
    """
    n = coeffs.b.size
    Bset = _as_set(B, n)
    H = coeffs.sigma2 * coeffs.A
    g = coeffs.b.copy()
    if pen is not None:
        H = H + 2.0 * pen.xi * np.diag(pen.P_diag)
        g = g - pen.xi * pen.q
    off = [v for v in range(n) if v not in set(Bset.nodes)]
    C = np.zeros((1 + len(off), n))
    C[0] = 1.0
    for r, v in enumerate(off, start=1):
        C[r, v] = 1.0
    d = np.zeros(C.shape[0])
    d[0] = 1.0
    m = C.shape[0]
    K = np.block([[H, C.T], [C, np.zeros((m, m))]])
    try:
        sol = np.linalg.solve(K, np.concatenate([g, d]))
    except np.linalg.LinAlgError as exc:
        raise SingularKKT(str(exc)) from exc
    if not np.all(np.isfinite(sol)):
        raise SingularKKT("non-finite KKT solution")
    a = sol[:n]
    a[off] = 0.0
    # land exactly on the constraint surface for ControlVector validation
    a[list(Bset.nodes)] += (1.0 - a.sum()) / Bset.k
    return ControlVector(a, Bset.nodes)


def projected_gradient_oracle(
    coeffs: LossCoefficients,
    pen: PenaltyModel | None,
    B,
    max_iter: int = 100_000,
    tol: float = 1e-15,
) -> np.ndarray:
    """First-order solution of the same QP as :func:`kkt_oracle`.

    Fixed step ``1/lambda_max(H)``, projection onto the affine feasible set.
    """
    n = coeffs.b.size
    Bset = _as_set(B, n)
    H = coeffs.sigma2 * coeffs.A
    g = coeffs.b.copy()
    if pen is not None:
        H = H + 2.0 * pen.xi * np.diag(pen.P_diag)
        g = g - pen.xi * pen.q
    mask = Bset.mask()
    lip = np.linalg.eigvalsh(H[np.ix_(mask, mask)])[-1]
    x0 = np.where(mask, 1.0 / Bset.k, 0.0)
    x, _ = kernels.projected_gradient(H, g, mask, x0, 1.0 / lip, max_iter, tol)
    return x


def equal_share(n: int, nodes: Iterable[int]) -> ControlVector:
    return ControlVector.equal_share(n, nodes)
