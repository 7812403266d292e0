from __future__ import annotations

import pytest

from q2cert.config import Q2CertConfig
from q2cert.errors import HypothesisError
from q2cert.graph import Graph, complement, path_graph
from q2cert.oracle import diagonal_witness, enumerate_dense_graphs, q_bounds
from q2cert.spectral import distinct_eigenvalues

from .graphs import co_of


@pytest.mark.parametrize("n", [2, 4, 7])
def test_complete_graphs_have_two_eigenvalues(n: int) -> None:
    bounds = q_bounds(Graph.complete(n))
    assert (bounds.lower, bounds.upper) == (2, 2)
    assert bounds.conclusive
    assert bounds.upper_reason == "complete"


def test_single_vertex_has_one_eigenvalue() -> None:
    bounds = q_bounds(Graph.empty(1))
    assert (bounds.lower, bounds.upper) == (1, 1)


@pytest.mark.parametrize("g", [path_graph(3), co_of(path_graph(4), isolated=1)])
def test_unique_path_graphs_have_three(g: Graph, config: Q2CertConfig) -> None:
    bounds = q_bounds(g, config=config)
    assert bounds.lower == 3
    assert bounds.lower_reason == "unique_p2"
    assert bounds.lower_witness is not None
    assert bounds.upper == 3
    assert bounds.witness is not None


def test_q2_search_on_four_cycle(config: Q2CertConfig) -> None:
    bounds = q_bounds(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]), config=config)
    assert (bounds.lower, bounds.upper) == (2, 2)
    assert bounds.upper_reason == "q2_search"


def test_q_bounds_rejects_out_of_range_inputs() -> None:
    with pytest.raises(HypothesisError):
        q_bounds(Graph.complete(11))
    with pytest.raises(HypothesisError):
        q_bounds(Graph.empty(3))


def test_diagonal_witness_has_n_eigenvalues() -> None:
    r = diagonal_witness(path_graph(5))
    assert distinct_eigenvalues(r.best()).distinct_count == 5


@pytest.mark.parametrize(
    ("n", "max_edges", "count"),
    [(4, 1, 2), (5, 2, 4), (4, 6, 11), (5, 3, 8), (6, 4, 18)],
)
def test_enumerate_dense_graphs_counts(n: int, max_edges: int, count: int) -> None:
    graphs = list(enumerate_dense_graphs(n, max_edges))
    assert len(graphs) == count
    assert all(complement(g).edge_count <= max_edges for g in graphs)


def test_enumerate_dense_graphs_range() -> None:
    with pytest.raises(HypothesisError):
        list(enumerate_dense_graphs(9, 1))
