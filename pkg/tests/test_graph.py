import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gridloss.errors import DisconnectedGraph, IndexOutOfRange, InvalidGraph, InvalidParameter
from gridloss.graph import (
    EdgePerturbation,
    WeightedGraph,
    build_laplacian,
    complete_graph,
    cycle_graph,
    effective_resistance,
    path_graph,
    perturb_edge,
    random_connected_graph,
    resistance_matrix,
    total_effective_resistance,
    total_effective_resistance_pairwise,
)


def spectral_pinv(L):
    """Independent oracle: sum over nonzero eigenpairs v v' / lambda."""
    lam, V = np.linalg.eigh(L)
    keep = lam > 1e-9 * lam[-1]
    return (V[:, keep] / lam[keep]) @ V[:, keep].T


def test_path3_pseudoinverse():
    lp = build_laplacian(path_graph(3))
    expected = np.array([[5, -1, -4], [-1, 2, -1], [-4, -1, 5]]) / 9
    np.testing.assert_allclose(lp.Lplus, expected, atol=1e-14)
    np.testing.assert_allclose(spectral_pinv(lp.L), expected, atol=1e-14)
    np.testing.assert_allclose(lp.eigenvalues, [0, 1, 3], atol=1e-12)


def test_cycle4_pseudoinverse():
    lp = build_laplacian(cycle_graph(4))
    assert np.trace(lp.Lplus) == pytest.approx(5 / 4, rel=1e-14)
    assert lp.Lplus[0, 0] == pytest.approx(5 / 16)
    assert lp.Lplus[0, 1] == pytest.approx(-1 / 16)
    assert lp.Lplus[0, 2] == pytest.approx(-3 / 16)


def test_single_edge():
    lp = build_laplacian(WeightedGraph(2, ((0, 1, 1.0),)))
    np.testing.assert_allclose(lp.Lplus, [[0.25, -0.25], [-0.25, 0.25]], atol=1e-15)
    assert total_effective_resistance(lp) == pytest.approx(1.0)


def test_laplacian_rows_sum_to_zero(rng):
    g = random_connected_graph(15, rng=rng, weights=(0.1, 5.0))
    lp = build_laplacian(g)
    assert np.abs(lp.L.sum(axis=1)).max() <= 1e-10 * np.abs(lp.L).max()
    assert abs(lp.eigenvalues[0]) < 1e-10 and lp.eigenvalues[1] > 0


@pytest.mark.parametrize(
    "n, edges, exc",
    [
        (3, [(0, 0, 1.0), (1, 2, 1.0)], InvalidGraph),
        (3, [(0, 1, 1.0), (1, 0, 2.0)], InvalidGraph),
        (3, [(0, 1, 0.0), (1, 2, 1.0)], InvalidGraph),
        (3, [(0, 1, -1.0), (1, 2, 1.0)], InvalidGraph),
        (3, [(0, 5, 1.0)], InvalidGraph),
        (1, [], InvalidGraph),
    ],
)
def test_invalid_graphs(n, edges, exc):
    with pytest.raises(exc):
        WeightedGraph.from_edges(n, edges)


def test_disconnected_graph():
    g = WeightedGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(DisconnectedGraph):
        build_laplacian(g)


def test_effective_resistance_values():
    p3 = build_laplacian(path_graph(3))
    assert effective_resistance(p3, 0, 2) == pytest.approx(2.0)
    assert effective_resistance(p3, 1, 1) == 0.0
    c4 = build_laplacian(cycle_graph(4))
    # cycle formula d(n - d)/n
    assert effective_resistance(c4, 0, 1) == pytest.approx(3 / 4)
    assert effective_resistance(c4, 0, 2) == pytest.approx(1.0)
    with pytest.raises(IndexOutOfRange):
        effective_resistance(c4, 0, 4)


def test_total_effective_resistance_values():
    assert total_effective_resistance(build_laplacian(cycle_graph(4))) == pytest.approx(5.0)
    assert total_effective_resistance(build_laplacian(path_graph(3))) == pytest.approx(4.0)
    # K_n: R_tot = n - 1
    assert total_effective_resistance(build_laplacian(complete_graph(6))) == pytest.approx(5.0)


def test_effective_resistance_matches_series_parallel():
    # two parallel paths of resistance 2 and 1 between nodes 0 and 3
    g = WeightedGraph.from_edges(4, [(0, 1, 1.0), (1, 3, 1.0), (0, 2, 2.0), (2, 3, 2.0)])
    lp = build_laplacian(g)
    assert effective_resistance(lp, 0, 3) == pytest.approx(1 / (1 / 2 + 1 / 1))


graphs = st.builds(
    lambda n, seed: random_connected_graph(n, rng=seed, weights=(0.2, 3.0)),
    st.integers(2, 20),
    st.integers(0, 2**32 - 1),
)


@settings(max_examples=100, deadline=None)
@given(graphs)
def test_penrose_conditions(g):
    lp = build_laplacian(g)
    lp.check_penrose(1e-8)
    np.testing.assert_allclose(lp.Lplus, spectral_pinv(lp.L), atol=1e-9 * np.abs(lp.Lplus).max())


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_total_resistance_two_forms(g):
    lp = build_laplacian(g)
    a = total_effective_resistance(lp)
    b = total_effective_resistance_pairwise(lp)
    assert a == pytest.approx(b, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(graphs, st.integers(0, 2**32 - 1))
def test_perturb_edge_matches_rebuild_and_rayleigh(g, seed):
    rng = np.random.default_rng(seed)
    lp = build_laplacian(g)
    i, j = rng.choice(g.n, size=2, replace=False)
    beta = float(rng.uniform(0.01, 5.0))
    new = perturb_edge(lp, EdgePerturbation(int(i), int(j), beta))
    rebuilt = build_laplacian(g.with_weight_added(int(i), int(j), beta))
    err = np.linalg.norm(new.Lplus - rebuilt.Lplus) / np.linalg.norm(rebuilt.Lplus)
    assert err <= 1e-8
    np.testing.assert_allclose(new.L, rebuilt.L, atol=1e-12)
    R0 = resistance_matrix(lp)
    R1 = resistance_matrix(new)
    assert np.all(R1 <= R0 + 1e-12)


def test_perturb_adds_triangle_edge():
    lp = build_laplacian(path_graph(3))
    new = perturb_edge(lp, EdgePerturbation(0, 2, 1.0))
    assert np.trace(new.Lplus) == pytest.approx(2 / 3, rel=1e-12)


def test_perturb_existing_edge_matches_rebuild():
    g = cycle_graph(4)
    new = perturb_edge(build_laplacian(g), EdgePerturbation(1, 2, 0.7))
    rebuilt = build_laplacian(g.with_weight_added(1, 2, 0.7))
    np.testing.assert_allclose(new.Lplus, rebuilt.Lplus, atol=1e-12)
    assert new.graph.edges[1] == (1, 2, 1.7)


def test_perturb_tiny_beta_is_continuous(rng):
    lp = build_laplacian(random_connected_graph(8, rng=rng))
    new = perturb_edge(lp, EdgePerturbation(0, 5, 1e-12))
    assert np.abs(new.Lplus - lp.Lplus).max() <= 1e-9


def test_perturbation_validation():
    with pytest.raises(InvalidParameter):
        EdgePerturbation(1, 1, 1.0)
    with pytest.raises(InvalidParameter):
        EdgePerturbation(0, 1, 0.0)
    lp = build_laplacian(path_graph(3))
    with pytest.raises(IndexOutOfRange):
        perturb_edge(lp, EdgePerturbation(0, 3, 1.0))


def test_build_is_deterministic(rng):
    g = random_connected_graph(12, rng=rng, weights=(0.5, 2.0))
    a, b = build_laplacian(g), build_laplacian(g)
    assert np.array_equal(a.Lplus, b.Lplus)
