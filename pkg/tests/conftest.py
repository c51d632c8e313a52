import time

import numpy as np
import pytest

from gridloss.graph import build_laplacian, random_connected_graph
from gridloss.stochastic import validate_covariance


def random_psd(rng, n, support=None, rank=None):
    """Random PSD covariance, zero outside ``support`` (all nodes by default)."""
    support = np.arange(n) if support is None else np.asarray(sorted(support))
    r = rank if rank is not None else int(rng.integers(1, support.size + 1))
    G = np.zeros((n, r))
    G[support] = rng.normal(size=(support.size, r))
    Sigma = G @ G.T
    # rank-deficient draws can have 1'Sigma1 ~ 0; redraw instead of tolerating it
    if Sigma.sum() < 1e-3 * np.trace(Sigma):
        return random_psd(rng, n, support, rank)
    return Sigma


def random_instance(rng, n_lo=3, n_hi=12, weighted=True):
    n = int(rng.integers(n_lo, n_hi + 1))
    g = random_connected_graph(n, p=float(rng.uniform(0.3, 0.8)), rng=rng,
                               weights=(0.5, 2.0) if weighted else None)
    lp = build_laplacian(g)
    cov = validate_covariance(random_psd(rng, n))
    return g, lp, cov


def random_feasible_alpha(rng, n, support=None):
    support = np.arange(n) if support is None else np.asarray(support)
    a = np.zeros(n)
    a[support] = rng.normal(size=support.size)
    a[support] += (1.0 - a.sum()) / support.size
    return a


def random_balanced_mu(rng, n):
    mu = rng.normal(size=n)
    return mu - mu.mean()


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


# --- acceptance summary --------------------------------------------------

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if name.startswith("test_ac"):
        _ACCEPTANCE.append((name, report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, dur in sorted(_ACCEPTANCE):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  ({dur:.2f}s)")


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        return False


@pytest.fixture
def stopwatch():
    return Stopwatch
