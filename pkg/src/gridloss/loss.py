"""Realized and expected transport losses under affine load sharing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .errors import DimensionMismatch, InfeasibleControl
from .graph import LaplacianPair
from .stochastic import CovarianceModel, LoadProfile

SUM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ControlVector:
    """Load-sharing coefficients ``alpha`` with support ``B``.

    Entries may be negative. ``alpha`` must sum to one and vanish off the
    support. The balancing matrix ``I - alpha 1'`` is never formed; it is
    applied as ``p - alpha (1'w)``.
    """

    alpha: np.ndarray
    support: tuple[int, ...]

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        if a.ndim != 1:
            raise DimensionMismatch("alpha must be a vector")
        support = tuple(sorted(int(i) for i in self.support))
        if not support:
            raise InfeasibleControl("support must contain at least one node")
        if len(set(support)) != len(support) or support[0] < 0 or support[-1] >= a.size:
            raise InfeasibleControl(f"invalid support {support} for n={a.size}")
        if abs(a.sum() - 1.0) > SUM_TOL:
            raise InfeasibleControl(f"load-sharing factors sum to {a.sum()!r}, not 1")
        off = np.ones(a.size, dtype=bool)
        off[list(support)] = False
        if np.any(a[off] != 0.0):
            raise InfeasibleControl("alpha has nonzero entries outside its support")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "support", support)

    @classmethod
    def from_array(cls, alpha, support: Iterable[int] | None = None) -> "ControlVector":
        a = np.asarray(alpha, dtype=float)
        if support is None:
            support = np.flatnonzero(a)
        return cls(a, tuple(support))

    @classmethod
    def equal_share(cls, n: int, nodes: Iterable[int]) -> "ControlVector":
        nodes = sorted(set(int(i) for i in nodes))
        a = np.zeros(n)
        a[nodes] = 1.0 / len(nodes)
        return cls(a, tuple(nodes))

    @classmethod
    def uniform(cls, n: int) -> "ControlVector":
        return cls(np.full(n, 1.0 / n), tuple(range(n)))

    @property
    def n(self) -> int:
        return self.alpha.size

    def balance(self, omega: np.ndarray) -> np.ndarray:
        """Apply ``I - alpha 1'`` to ``omega`` (vector or batch of rows)."""
        omega = np.asarray(omega, dtype=float)
        return omega - np.multiply.outer(omega.sum(axis=-1), self.alpha)


def as_control(alpha) -> ControlVector:
    if isinstance(alpha, ControlVector):
        return alpha
    return ControlVector.from_array(alpha)


@dataclass(frozen=True)
class LossReport:
    expected_stochastic_loss: float
    deterministic_loss: float

    @property
    def expected_total(self) -> float:
        return self.expected_stochastic_loss + self.deterministic_loss

    def to_dict(self) -> dict:
        return {
            "stochastic": self.expected_stochastic_loss,
            "deterministic": self.deterministic_loss,
            "total": self.expected_total,
        }


@dataclass(frozen=True, eq=False)
class LossCoefficients:
    """``E H(alpha) = sigma2/2 alpha'A alpha - b'alpha + c``."""

    A: np.ndarray
    b: np.ndarray
    c: float
    sigma2: float

    def __call__(self, alpha) -> float:
        a = alpha.alpha if isinstance(alpha, ControlVector) else np.asarray(alpha, dtype=float)
        return float(0.5 * self.sigma2 * a @ self.A @ a - self.b @ a + self.c)


def _check_dims(n: int, *objs) -> None:
    for o in objs:
        if o is not None and o.n != n:
            raise DimensionMismatch(f"expected dimension {n}, got {o.n}")


def _mu(mu: LoadProfile | None, n: int) -> np.ndarray:
    return np.zeros(n) if mu is None else mu.mu


def net_profile(mu: LoadProfile | None, omega, alpha) -> np.ndarray:
    alpha = as_control(alpha)
    return _mu(mu, alpha.n) + alpha.balance(omega)


def realized_loss(lp: LaplacianPair, mu: LoadProfile | None, omega, alpha) -> float:
    """Total loss ``0.5 p(alpha)' L+ p(alpha)`` for one fluctuation realization."""
    alpha = as_control(alpha)
    omega = np.asarray(omega, dtype=float)
    _check_dims(lp.n, alpha, mu)
    if omega.shape != (lp.n,):
        raise DimensionMismatch(f"omega has shape {omega.shape}, expected ({lp.n},)")
    p = net_profile(mu, omega, alpha)
    return float(0.5 * p @ lp.Lplus @ p)


def realized_losses(lp: LaplacianPair, mu: LoadProfile | None, omegas, alpha) -> np.ndarray:
    """Vectorized :func:`realized_loss` over the rows of ``omegas``."""
    alpha = as_control(alpha)
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    _check_dims(lp.n, alpha, mu)
    if omegas.shape[1] != lp.n:
        raise DimensionMismatch(f"omega rows have length {omegas.shape[1]}, expected {lp.n}")
    return kernels.realized_losses(lp.Lplus, _mu(mu, lp.n), omegas, alpha.alpha)


def stochastic_loss(lp: LaplacianPair, cov: CovarianceModel, alpha) -> float:
    a = alpha.alpha if isinstance(alpha, ControlVector) else np.asarray(alpha, dtype=float)
    Lp = lp.Lplus
    La = Lp @ a
    return float(
        0.5 * cov.total_variance * (a @ La)
        - cov.row_sums @ La
        + 0.5 * np.sum(cov.sigma_matrix * Lp)
    )


def expected_loss(lp: LaplacianPair, cov: CovarianceModel, mu: LoadProfile | None, alpha) -> LossReport:
    """Expected loss split into stochastic and deterministic parts.

    The stochastic part is
    ``sigma2/2 alpha'L+alpha - 1'Sigma L+ alpha + tr(Sigma L+)/2`` and the
    nominal profile only contributes the constant ``mu'L+mu / 2``.
    """
    alpha = as_control(alpha)
    _check_dims(lp.n, alpha, cov, mu)
    m = _mu(mu, lp.n)
    return LossReport(stochastic_loss(lp, cov, alpha), float(0.5 * m @ lp.Lplus @ m))


def loss_coefficients(lp: LaplacianPair, cov: CovarianceModel, mu: LoadProfile | None = None) -> LossCoefficients:
    _check_dims(lp.n, cov, mu)
    m = _mu(mu, lp.n)
    Lp = lp.Lplus
    c = 0.5 * float(np.sum(cov.sigma_matrix * Lp)) + 0.5 * float(m @ Lp @ m)
    return LossCoefficients(Lp, Lp @ cov.row_sums, max(c, 0.0), cov.total_variance)
