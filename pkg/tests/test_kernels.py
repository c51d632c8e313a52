import json
import os
import subprocess
import sys

import numpy as np
import pytest

from gridloss import _accel, kernels
from gridloss.graph import build_laplacian, random_connected_graph

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def _lp(rng, n):
    return build_laplacian(random_connected_graph(n, rng=rng, weights=(0.3, 2.0))).Lplus


def test_realized_losses_backends_agree(rng):
    for n in (2, 5, 13):
        Lp = _lp(rng, n)
        mu = rng.normal(size=n)
        mu -= mu.mean()
        alpha = rng.dirichlet(np.ones(n))
        omega = rng.normal(size=(257, n))
        a = kernels.realized_losses_numba(Lp, mu, omega, alpha)
        b = kernels.realized_losses_numpy(Lp, mu, omega, alpha)
        np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-14)


def test_subset_sums_backends_agree(rng):
    for n in (3, 7, 10):
        Lp = _lp(rng, n)
        b = rng.normal(size=n)
        for k in range(1, n + 1):
            qa, la = kernels.subset_quadratic_sums_numba(Lp, b, k)
            qb, lb = kernels.subset_quadratic_sums_numpy(Lp, b, k, chunk=7)
            np.testing.assert_allclose(qa, qb, rtol=1e-12, atol=1e-13)
            np.testing.assert_allclose(la, lb, rtol=1e-12, atol=1e-13)


def test_subset_sums_order_is_lexicographic():
    Lp = np.arange(16, dtype=float).reshape(4, 4)
    Lp = Lp + Lp.T  # the kernel reads the upper triangle only
    quad, lin = kernels.subset_quadratic_sums_numba(Lp, np.array([1.0, 10.0, 100.0, 1000.0]), 2)
    np.testing.assert_array_equal(lin, [11, 101, 1001, 110, 1010, 1100])
    assert quad[0] == Lp[0, 0] + Lp[0, 1] + Lp[1, 0] + Lp[1, 1]


def test_projected_gradient_backends_agree(rng):
    n = 6
    A = rng.normal(size=(n, n))
    H = A @ A.T + np.eye(n)
    g = rng.normal(size=n)
    mask = np.array([True, False, True, True, False, True])
    x0 = rng.normal(size=n)
    step = 1.0 / np.linalg.eigvalsh(H).max()
    xa, ia = kernels.projected_gradient_numba(H, g, mask, x0, step, 500, 0.0)
    xb, ib = kernels.projected_gradient_numpy(H, g, mask, x0, step, 500, 0.0)
    assert ia == ib == 500
    np.testing.assert_allclose(xa, xb, rtol=1e-9, atol=1e-12)
    assert np.all(xa[~mask] == 0.0)
    assert xa.sum() == pytest.approx(1.0)


def test_env_flag_selects_numpy_backend():
    code = (
        "import json, numpy as np\n"
        "from gridloss import _accel\n"
        "from gridloss.graph import build_laplacian, cycle_graph\n"
        "from gridloss.stochastic import iid_covariance\n"
        "from gridloss.placement import average_loss_k\n"
        "lp = build_laplacian(cycle_graph(6))\n"
        "v = [average_loss_k(lp, iid_covariance(6, 1.0), k).enumerated for k in range(1, 7)]\n"
        "print(json.dumps({'backend': _accel.backend(), 'v': v}))\n"
    )
    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, GRIDLOSS_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        outs[flag] = json.loads(res.stdout)
    assert outs["0"]["backend"] == "numpy"
    assert outs["1"]["backend"] == "numba"
    np.testing.assert_allclose(outs["0"]["v"], outs["1"]["v"], rtol=1e-12)
