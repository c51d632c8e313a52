from itertools import combinations
from math import comb

import numpy as np
import pytest

from gridloss.errors import InvalidK
from gridloss.graph import build_laplacian, cycle_graph, random_connected_graph
from gridloss.loss import ControlVector, expected_loss
from gridloss.placement import (
    average_loss_k,
    empirical_random_placement_trace,
    enumerate_placements,
    gamma_ratio,
    scaling_curve,
    search_equal_share_witness,
)
from gridloss.stochastic import iid_covariance, validate_covariance

from conftest import random_instance


def brute_force_average(lp, cov, k):
    """Oracle: average expected_loss over every equal-share placement."""
    n = lp.n
    vals = [expected_loss(lp, cov, None, ControlVector.equal_share(n, B)).expected_stochastic_loss
            for B in combinations(range(n), k)]
    return float(np.mean(vals))


def test_cycle4_iid_constants():
    lp = build_laplacian(cycle_graph(4))
    cov = iid_covariance(4, 1.0)
    h1 = average_loss_k(lp, cov, 1)
    assert h1.C1 == pytest.approx(5 / 12)
    assert h1.C2 == pytest.approx(5 / 6)
    assert h1.closed_form == pytest.approx(5 / 4)
    assert average_loss_k(lp, cov, 2).closed_form == pytest.approx(5 / 6)
    assert average_loss_k(lp, cov, 3).closed_form == pytest.approx(25 / 36)
    h4 = average_loss_k(lp, cov, 4)
    assert h4.closed_form == pytest.approx(5 / 8)
    assert h4.enumerated == pytest.approx(0.5 * np.trace(lp.Lplus))
    for k in range(1, 5):
        assert average_loss_k(lp, cov, k).enumerated == pytest.approx(brute_force_average(lp, cov, k), rel=1e-12)


def test_closed_form_equals_enumeration(rng):
    for _ in range(10):
        g, lp, cov = random_instance(rng, n_lo=2, n_hi=9)
        for k in range(1, g.n + 1):
            avg = average_loss_k(lp, cov, k)
            assert avg.C2 > 0
            assert avg.closed_form >= -1e-12
            assert abs(avg.closed_form - avg.enumerated) <= 1e-10 * (1 + abs(avg.closed_form))
            assert avg.enumerated == pytest.approx(brute_force_average(lp, cov, k), rel=1e-10, abs=1e-12)


def test_k1_is_c1_plus_c2(rng):
    g, lp, cov = random_instance(rng)
    avg = average_loss_k(lp, cov, 1)
    assert avg.enumerated == pytest.approx(avg.C1 + avg.C2, rel=1e-12)


def test_enumeration_cap(rng):
    lp = build_laplacian(random_connected_graph(12, rng=rng))
    cov = iid_covariance(12, 1.0)
    assert average_loss_k(lp, cov, 6, cap=100).enumerated is None
    assert average_loss_k(lp, cov, 6).enumerated is not None


def test_invalid_k():
    lp = build_laplacian(cycle_graph(4))
    cov = iid_covariance(4, 1.0)
    for k in (0, 5):
        with pytest.raises(InvalidK):
            average_loss_k(lp, cov, k)
    with pytest.raises(InvalidK):
        scaling_curve(lp, cov, 5)


def test_linear_identity_by_direct_summation(rng):
    for _ in range(5):
        g, lp, _ = random_instance(rng, n_lo=2, n_hi=10)
        n = g.n
        for k in range(1, n + 1):
            acc = np.zeros(n)
            for B in combinations(range(n), k):
                ind = np.zeros(n)
                ind[list(B)] = 1.0
                acc += lp.Lplus @ ind
            assert np.abs(acc).max() <= 1e-10 * comb(n, k) * np.abs(lp.Lplus).max()


def test_quadratic_identity_by_direct_summation(rng):
    for _ in range(5):
        g, lp, _ = random_instance(rng, n_lo=2, n_hi=10)
        n = g.n
        tr = np.trace(lp.Lplus)
        for k in range(1, n + 1):
            acc = 0.0
            for B in combinations(range(n), k):
                idx = list(B)
                acc += lp.Lplus[np.ix_(idx, idx)].sum()
            # comb(n - 2, n - 1) == 0 by convention (and by math.comb)
            assert acc == pytest.approx(comb(n - 2, k - 1) * tr, rel=1e-10, abs=1e-10 * comb(n, k) * tr)


def test_curve_is_strictly_decreasing(rng):
    for _ in range(10):
        g, lp, cov = random_instance(rng)
        curve = scaling_curve(lp, cov, g.n)
        r = [x for _, x in curve.ratios]
        assert r[0] == 1.0
        assert all(b < a for a, b in zip(r, r[1:]))
        assert r[-1] <= 1.0


def test_iid_gamma_and_large_n_limit():
    lp = build_laplacian(random_connected_graph(200, rng=5))
    cov = iid_covariance(200, 1.0)
    assert gamma_ratio(lp, cov) == pytest.approx(199 / 200, rel=1e-12)
    curve = scaling_curve(lp, cov, 20)
    for k, ratio in curve.ratios:
        assert abs(ratio - (0.5 + 0.5 / k)) <= 2.0 / 200
    a, b = curve.asymptote
    assert a + b == pytest.approx(1.0)


def test_trace_last_entry_is_uniform_loss(rng):
    g, lp, cov = random_instance(rng)
    tr = empirical_random_placement_trace(lp, cov, seed=4)
    assert [k for k, _ in tr] == list(range(1, g.n + 1))
    assert tr[-1][1] == pytest.approx(expected_loss(lp, cov, None, ControlVector.uniform(g.n)).expected_stochastic_loss)
    assert tr == empirical_random_placement_trace(lp, cov, seed=4)


def test_trace_average_tracks_closed_form(rng):
    g, lp, cov = random_instance(rng, n_lo=8, n_hi=10)
    traces = np.array([[x for _, x in empirical_random_placement_trace(lp, cov, s)] for s in range(200)])
    mean = traces.mean(axis=0)
    se = traces.std(axis=0, ddof=1) / np.sqrt(200)
    for k in range(1, g.n + 1):
        h = average_loss_k(lp, cov, k).closed_form
        assert abs(mean[k - 1] - h) <= 3 * se[k - 1] + 1e-12


def test_cycle_traces_at_symmetric_sizes():
    # every size-1, size-(n-1) and size-n placement on a cycle is equivalent
    n = 7
    lp = build_laplacian(cycle_graph(n))
    cov = iid_covariance(n, 1.0)
    for seed in range(20):
        tr = dict(empirical_random_placement_trace(lp, cov, seed))
        for k in (1, n - 1, n):
            assert tr[k] == pytest.approx(average_loss_k(lp, cov, k).closed_form, rel=1e-12)


def test_cycle_intermediate_sizes_are_not_symmetric():
    lp = build_laplacian(cycle_graph(4))
    losses = enumerate_placements(lp, iid_covariance(4, 1.0), 2)
    # lexicographic: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
    np.testing.assert_allclose(losses, [7 / 8, 3 / 4, 7 / 8, 7 / 8, 3 / 4, 7 / 8], rtol=1e-12)
    assert losses.mean() == pytest.approx(5 / 6)


def test_witness_search_finds_nonmonotone_instance():
    w = search_equal_share_witness(seed=0)
    assert w is not None
    assert w.loss_after > w.loss_before
    lp = build_laplacian(w.graph)
    cov = iid_covariance(w.graph.n, 1.0)
    before = expected_loss(lp, cov, None, ControlVector.equal_share(w.graph.n, w.nodes)).expected_stochastic_loss
    assert before == pytest.approx(w.loss_before)


def test_nonnegative_correlated_average(rng):
    g, lp, _ = random_instance(rng)
    cov = validate_covariance(np.eye(g.n) + 0.3)
    assert average_loss_k(lp, cov, g.n).closed_form >= 0
