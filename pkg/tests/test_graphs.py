import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steklab.graphs import (
    MetricGraph,
    graph_from_dict,
    graph_laplacian,
    graph_spectrum,
    graph_to_dict,
    load_graph,
    mu_reference,
    save_graph,
)


def test_laplacian_examples():
    assert np.array_equal(graph_laplacian(MetricGraph.complete(3)), [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
    l = 0.25
    assert np.allclose(graph_laplacian(MetricGraph(2, [(0, 1, l)])), [[1 / l, -1 / l], [-1 / l, 1 / l]])


@pytest.mark.parametrize("n", range(2, 9))
def test_complete_graph_spectrum(n):
    vals, vecs = graph_spectrum(MetricGraph.complete(n))
    # L = n I - J: 0 on constants and n on the orthogonal complement
    assert abs(vals[0]) < 1e-10
    assert np.allclose(vals[1:], n, atol=1e-10)
    assert np.allclose(np.abs(vecs[:, 0]), 1 / np.sqrt(n))
    assert np.count_nonzero(np.abs(vals - n) < 1e-10) == mu_reference(n)


def test_two_vertex_path():
    vals, _ = graph_spectrum(MetricGraph(2, [(0, 1, 0.5)]))
    assert np.allclose(vals, [0.0, 4.0])


def test_doubling_measures_halves_spectrum():
    G = MetricGraph(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (0, 3, 1.5)], measures=[1, 2, 3, 4])
    H = MetricGraph(4, G.edges, measures=2 * G.measures)
    assert np.allclose(graph_spectrum(H)[0], graph_spectrum(G)[0] / 2)


def test_potential_shifts_spectrum():
    G = MetricGraph.complete(4)
    H = MetricGraph(4, G.edges, potential=np.full(4, 0.7))
    assert np.allclose(graph_spectrum(H)[0], graph_spectrum(G)[0] + 0.7)


def test_rejections():
    with pytest.raises(ValueError):
        graph_spectrum(MetricGraph(3, [(0, 1, 1.0)]))
    with pytest.raises(ValueError):
        MetricGraph(2, [(0, 0, 1.0)])
    with pytest.raises(ValueError):
        MetricGraph(2, [(0, 1, 1.0), (1, 0, 2.0)])
    with pytest.raises(ValueError):
        MetricGraph(2, [(0, 1, -1.0)])
    with pytest.raises(ValueError):
        MetricGraph(2, [(0, 1, 1.0)], measures=[1.0, 0.0])
    with pytest.raises(ValueError):
        MetricGraph(2, [(0, 2, 1.0)])


@pytest.mark.parametrize("n,expected", [(4, 3), (2, 1), (6, 5)])
def test_mu_reference(n, expected):
    assert mu_reference(n) == expected


def test_mu_reference_rejects_small():
    with pytest.raises(ValueError):
        mu_reference(1)


def test_json_round_trip(tmp_path):
    G = MetricGraph(3, [(0, 1, 1.0), (1, 2, 2.5)], measures=[1, 2, 3], potential=[0, 1, 0])
    save_graph(G, tmp_path / "g.json")
    back = load_graph(tmp_path / "g.json")
    assert graph_to_dict(back) == graph_to_dict(G)
    with pytest.raises(ValueError):
        graph_from_dict({"edges": []})


@st.composite
def connected_graphs(draw):
    n = draw(st.integers(2, 8))
    edges = {}
    for v in range(1, n):  # random spanning tree keeps the graph connected
        u = draw(st.integers(0, v - 1))
        edges[(u, v)] = draw(st.floats(0.1, 5.0))
    for _ in range(draw(st.integers(0, n))):
        a, b = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if a != b:
            edges[(min(a, b), max(a, b))] = draw(st.floats(0.1, 5.0))
    mu = draw(st.lists(st.floats(0.1, 5.0), min_size=n, max_size=n))
    return MetricGraph(n, [(a, b, l) for (a, b), l in edges.items()], measures=mu)


@settings(max_examples=50, deadline=None)
@given(connected_graphs())
def test_spectrum_invariants(G):
    L = graph_laplacian(G)
    assert np.allclose(L @ np.ones(G.n), 0.0)
    assert np.allclose(L, L.T)
    vals, vecs = graph_spectrum(G)
    assert len(vals) == G.n
    assert abs(vals[0]) < 1e-9 and vals[1] > 1e-9
    assert np.allclose(vecs.T @ np.diag(G.measures) @ vecs, np.eye(G.n), atol=1e-10)
