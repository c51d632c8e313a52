"""Hot numeric loops, each in a numba and a pure-numpy flavour.

The public names (``realized_losses``, ``subset_quadratic_sums``,
``projected_gradient``) dispatch on :data:`gridloss._accel.USE_NUMBA`. The
``*_numba`` / ``*_numpy`` variants stay importable so tests and the benchmark
can compare them directly.
"""
from __future__ import annotations

import itertools
from math import comb

import numpy as np

from . import _accel
from ._accel import njit, prange


# --- realized losses over a batch of fluctuation samples ------------------

@njit(parallel=True, fastmath=False)
def _realized_losses_nb(Lp, mu, omega, alpha):
    N, n = omega.shape
    out = np.empty(N)
    for s in prange(N):
        tot = 0.0
        for i in range(n):
            tot += omega[s, i]
        p = np.empty(n)
        for i in range(n):
            p[i] = mu[i] + omega[s, i] - alpha[i] * tot
        acc = 0.0
        for i in range(n):
            row = 0.0
            for j in range(n):
                row += Lp[i, j] * p[j]
            acc += p[i] * row
        out[s] = 0.5 * acc
    return out


def realized_losses_numba(Lp, mu, omega, alpha):
    return _realized_losses_nb(
        np.ascontiguousarray(Lp, dtype=np.float64),
        np.ascontiguousarray(mu, dtype=np.float64),
        np.ascontiguousarray(omega, dtype=np.float64),
        np.ascontiguousarray(alpha, dtype=np.float64),
    )


def realized_losses_numpy(Lp, mu, omega, alpha):
    omega = np.atleast_2d(omega)
    P = mu[None, :] + omega - np.outer(omega.sum(axis=1), alpha)
    return 0.5 * np.einsum("ij,ij->i", P @ Lp, P)


def realized_losses(Lp, mu, omega, alpha):
    """``0.5 p' Lp p`` for each row of ``omega``, ``p = mu + w - alpha (1'w)``."""
    if _accel.USE_NUMBA:
        return realized_losses_numba(Lp, mu, omega, alpha)
    return realized_losses_numpy(Lp, mu, omega, alpha)


# --- sums over all k-subsets ---------------------------------------------

@njit
def _subset_sums_nb(Lp, b, k):
    n = Lp.shape[0]
    total = 1
    for t in range(k):
        total = total * (n - t) // (t + 1)
    quad = np.empty(total)
    lin = np.empty(total)
    idx = np.arange(k)
    for c in range(total):
        q = 0.0
        li = 0.0
        for a in range(k):
            ia = idx[a]
            li += b[ia]
            q += Lp[ia, ia]
            for bb in range(a + 1, k):
                q += 2.0 * Lp[ia, idx[bb]]
        quad[c] = q
        lin[c] = li
        # next combination in lexicographic order
        i = k - 1
        while i >= 0 and idx[i] == n - k + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, k):
            idx[j] = idx[j - 1] + 1
    return quad, lin


def subset_quadratic_sums_numba(Lp, b, k):
    return _subset_sums_nb(
        np.ascontiguousarray(Lp, dtype=np.float64), np.ascontiguousarray(b, dtype=np.float64), int(k)
    )


def subset_quadratic_sums_numpy(Lp, b, k, chunk=20000):
    n = Lp.shape[0]
    total = comb(n, k)
    quad = np.empty(total)
    lin = np.empty(total)
    it = itertools.combinations(range(n), k)
    pos = 0
    while pos < total:
        m = min(chunk, total - pos)
        idx = np.fromiter(itertools.chain.from_iterable(itertools.islice(it, m)), dtype=np.intp, count=m * k)
        idx = idx.reshape(m, k)
        quad[pos:pos + m] = Lp[idx[:, :, None], idx[:, None, :]].sum(axis=(1, 2))
        lin[pos:pos + m] = b[idx].sum(axis=1)
        pos += m
    return quad, lin


def subset_quadratic_sums(Lp, b, k):
    """For every k-subset B (lexicographic order) return ``1_B' Lp 1_B`` and ``b' 1_B``."""
    if _accel.USE_NUMBA:
        return subset_quadratic_sums_numba(Lp, b, k)
    return subset_quadratic_sums_numpy(Lp, b, k)


# --- projected gradient on {1'x = 1, x = 0 off the mask} -----------------

@njit
def _projected_gradient_nb(H, g, mask, x0, step, max_iter, tol):
    n = H.shape[0]
    x = x0.copy()
    k = 0
    for t in range(n):
        if mask[t]:
            k += 1
        else:
            x[t] = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        shift = 0.0
        y = np.empty(n)
        for i in range(n):
            if mask[i]:
                gi = -g[i]
                for j in range(n):
                    gi += H[i, j] * x[j]
                y[i] = x[i] - step * gi
                shift += y[i]
            else:
                y[i] = 0.0
        shift = (shift - 1.0) / k
        delta = 0.0
        for i in range(n):
            if mask[i]:
                y[i] -= shift
            d = abs(y[i] - x[i])
            if d > delta:
                delta = d
            x[i] = y[i]
        if delta <= tol:
            break
    return x, it


def projected_gradient_numba(H, g, mask, x0, step, max_iter, tol):
    return _projected_gradient_nb(
        np.ascontiguousarray(H, dtype=np.float64),
        np.ascontiguousarray(g, dtype=np.float64),
        np.ascontiguousarray(mask, dtype=np.bool_),
        np.ascontiguousarray(x0, dtype=np.float64),
        float(step), int(max_iter), float(tol),
    )


def projected_gradient_numpy(H, g, mask, x0, step, max_iter, tol):
    mask = np.asarray(mask, dtype=bool)
    k = mask.sum()
    x = np.where(mask, x0, 0.0)
    Hm = H[mask]
    gm = g[mask]
    it = 0
    for it in range(1, max_iter + 1):
        y = x[mask] - step * (Hm @ x - gm)
        y -= (y.sum() - 1.0) / k
        delta = np.abs(y - x[mask]).max()
        x[mask] = y
        if delta <= tol:
            break
    return x, it


def projected_gradient(H, g, mask, x0, step, max_iter=100_000, tol=0.0):
    """Minimize ``0.5 x'Hx - g'x`` over ``{1'x = 1, x_i = 0 where not mask}``.

    Plain projected gradient with fixed ``step``; stops after ``max_iter``
    iterations or once the largest coordinate change is ``<= tol``.
    Returns ``(x, iterations)``.
    """
    if _accel.USE_NUMBA:
        return projected_gradient_numba(H, g, mask, x0, step, max_iter, tol)
    return projected_gradient_numpy(H, g, mask, x0, step, max_iter, tol)
