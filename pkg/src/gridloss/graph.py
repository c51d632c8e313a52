"""Weighted graphs, Laplacians and their pseudoinverses.

Everything here is dense; graphs are expected to be desk scale (a few
hundred nodes at most).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DisconnectedGraph, IndexOutOfRange, InvalidGraph, InvalidParameter

# lambda_2 must exceed this fraction of lambda_n
CONNECTIVITY_RTOL = 1e-9


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected simple graph with strictly positive edge weights.

    Nodes are ``0..n-1``. Missing edges are simply absent from ``edges``.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n < 2:
            raise InvalidGraph(f"need at least 2 nodes, got {self.n}")
        seen = set()
        clean = []
        for e in self.edges:
            if len(e) == 2:
                u, v = e
                w = 1.0
            else:
                u, v, w = e
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidGraph(f"edge ({u}, {v}) out of range for n={self.n}")
            if u == v:
                raise InvalidGraph(f"self-loop at node {u}")
            if not np.isfinite(w) or w <= 0:
                raise InvalidGraph(f"edge ({u}, {v}) has non-positive weight {w}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidGraph(f"duplicate edge {key}")
            seen.add(key)
            clean.append((u, v, w))
        object.__setattr__(self, "edges", tuple(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence]) -> "WeightedGraph":
        return cls(n, tuple(tuple(e) for e in edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        W = np.zeros((self.n, self.n))
        for u, v, w in self.edges:
            W[u, v] = W[v, u] = w
        return W

    def laplacian_matrix(self) -> np.ndarray:
        W = self.adjacency()
        return np.diag(W.sum(axis=1)) - W

    def is_connected(self) -> bool:
        adj = [[] for _ in range(self.n)]
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n

    def with_weight_added(self, i: int, j: int, beta: float) -> "WeightedGraph":
        """Graph with ``beta`` added to edge (i, j), creating it if absent."""
        key = (min(i, j), max(i, j))
        edges = []
        found = False
        for u, v, w in self.edges:
            if (min(u, v), max(u, v)) == key:
                edges.append((u, v, w + beta))
                found = True
            else:
                edges.append((u, v, w))
        if not found:
            edges.append((i, j, beta))
        return WeightedGraph(self.n, tuple(edges))


@dataclass(frozen=True, eq=False)
class LaplacianPair:
    """A Laplacian, its Moore-Penrose pseudoinverse and spectral data.

    ``eigenvalues`` are ascending; ``eigenvectors`` holds them column-wise.
    """

    L: np.ndarray
    Lplus: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    graph: WeightedGraph | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.L.shape[0]

    def check_penrose(self, rtol: float = 1e-8) -> None:
        """Assert the Penrose conditions plus null-space alignment."""
        L, Lp = self.L, self.Lplus
        nl = np.linalg.norm(L)
        np_ = np.linalg.norm(Lp)
        assert np.linalg.norm(L @ Lp @ L - L) <= rtol * nl
        assert np.linalg.norm(Lp @ L @ Lp - Lp) <= rtol * np_
        assert np.abs(Lp.sum(axis=1)).max() <= 1e-10 * max(1.0, np.abs(Lp).max())


def _pseudoinverse(L: np.ndarray) -> np.ndarray:
    n = L.shape[0]
    J = np.full((n, n), 1.0 / n)
    Lp = np.linalg.solve(L + J, np.eye(n)) - J
    return 0.5 * (Lp + Lp.T)


def build_laplacian(g: WeightedGraph) -> LaplacianPair:
    """Laplacian of ``g`` and its pseudoinverse ``(L + J/n)^-1 - J/n``.

    Raises
    ------
    DisconnectedGraph
        If ``g`` is disconnected, either combinatorially or because
        ``lambda_2 <= 1e-9 * lambda_n``.
    """
    if not g.is_connected():
        raise DisconnectedGraph(f"graph with n={g.n}, m={g.m} is not connected")
    L = g.laplacian_matrix()
    lam, V = np.linalg.eigh(L)
    if lam[1] <= CONNECTIVITY_RTOL * lam[-1]:
        raise DisconnectedGraph(
            f"algebraic connectivity {lam[1]:.3e} below tolerance "
            f"({CONNECTIVITY_RTOL:g} * {lam[-1]:.3e})"
        )
    return LaplacianPair(L, _pseudoinverse(L), lam, V, g)


def _check_index(n: int, *idx: int) -> None:
    for i in idx:
        if not (0 <= i < n):
            raise IndexOutOfRange(f"node index {i} out of range for n={n}")


def effective_resistance(lp: LaplacianPair, i: int, j: int) -> float:
    _check_index(lp.n, i, j)
    if i == j:
        return 0.0
    P = lp.Lplus
    return float(P[i, i] + P[j, j] - 2.0 * P[i, j])


def resistance_matrix(lp: LaplacianPair) -> np.ndarray:
    d = np.diag(lp.Lplus)
    R = d[:, None] + d[None, :] - 2.0 * lp.Lplus
    np.fill_diagonal(R, 0.0)
    return R


def total_effective_resistance(lp: LaplacianPair) -> float:
    """Kirchhoff index ``n * tr(L+)``.

    Equal to half the sum of all pairwise effective resistances; see
    :func:`total_effective_resistance_pairwise` for that form.
    """
    return float(lp.n * np.trace(lp.Lplus))


def total_effective_resistance_pairwise(lp: LaplacianPair) -> float:
    return float(0.5 * resistance_matrix(lp).sum())


@dataclass(frozen=True)
class EdgePerturbation:
    i: int
    j: int
    beta: float

    def __post_init__(self):
        if self.i == self.j:
            raise InvalidParameter("perturbation needs two distinct nodes")
        if not self.beta > 0:
            raise InvalidParameter(f"beta must be positive, got {self.beta}")

    def incidence(self, n: int) -> np.ndarray:
        m = np.zeros(n)
        m[self.i] = 1.0
        m[self.j] = -1.0
        return m


def perturb_edge(lp: LaplacianPair, pert: EdgePerturbation) -> LaplacianPair:
    """Add ``beta`` to edge (i, j) with a rank-one pseudoinverse update.

    ``L' = L + beta m m^T`` and
    ``L'+ = L+ - (L+ m)(L+ m)^T / (1/beta + m^T L+ m)``.
    """
    _check_index(lp.n, pert.i, pert.j)
    m = pert.incidence(lp.n)
    L = lp.L + pert.beta * np.outer(m, m)
    u = lp.Lplus @ m
    Lp = lp.Lplus - np.outer(u, u) / (1.0 / pert.beta + m @ u)
    Lp = 0.5 * (Lp + Lp.T)
    lam, V = np.linalg.eigh(L)
    g = lp.graph.with_weight_added(pert.i, pert.j, pert.beta) if lp.graph is not None else None
    return LaplacianPair(L, Lp, lam, V, g)


# --- graph families -------------------------------------------------------

def path_graph(n: int, weight: float = 1.0) -> WeightedGraph:
    return WeightedGraph(n, tuple((i, i + 1, weight) for i in range(n - 1)))


def cycle_graph(n: int, weight: float = 1.0) -> WeightedGraph:
    return WeightedGraph(n, tuple((i, (i + 1) % n, weight) for i in range(n)))


def complete_graph(n: int, weight: float = 1.0) -> WeightedGraph:
    return WeightedGraph(n, tuple((i, j, weight) for i in range(n) for j in range(i + 1, n)))


def random_connected_graph(
    n: int,
    p: float | None = None,
    rng: np.random.Generator | int | None = None,
    weights: tuple[float, float] | None = None,
    max_tries: int = 1000,
) -> WeightedGraph:
    """Erdos-Renyi G(n, p) conditioned on connectivity (by rejection).

    The default ``p`` is ``min(1, 2 ln n / n)``, comfortably above the
    connectivity threshold. ``weights=(lo, hi)`` draws uniform weights,
    otherwise all weights are 1.
    """
    rng = np.random.default_rng(rng)
    if p is None:
        p = min(1.0, 2.0 * np.log(n) / n) if n > 2 else 1.0
    iu, ju = np.triu_indices(n, 1)
    for _ in range(max_tries):
        keep = rng.random(iu.size) < p
        if weights is None:
            w = np.ones(keep.sum())
        else:
            w = rng.uniform(weights[0], weights[1], keep.sum())
        g = WeightedGraph(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist(), w.tolist())))
        if g.is_connected():
            return g
    raise InvalidParameter(f"no connected G({n}, {p}) sample in {max_tries} tries")
