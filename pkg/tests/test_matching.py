from __future__ import annotations

import pytest

from q2cert.errors import HypothesisError
from q2cert.graph import Graph, PartiteSplit, bipartition, complement, cycle_graph, path_graph
from q2cert.matching import (
    BoxCertificate,
    HallViolator,
    PerfectMatching,
    box_product_certificate,
    perfect_matching,
)
from q2cert.oracle import enumerate_dense_graphs
from q2cert.structure import is_simplified

from .graphs import co_of


def _split(left: set[int], right: set[int]) -> PartiteSplit:
    return PartiteSplit(frozenset(left), frozenset(right))


def test_perfect_matching_k33() -> None:
    h = Graph.from_edges(6, [(u, v) for u in range(3) for v in range(3, 6)])
    split = _split({0, 1, 2}, {3, 4, 5})
    found = perfect_matching(h, split)
    assert isinstance(found, PerfectMatching)
    assert found.is_valid_for(h, split)


def test_perfect_matching_even_cycle() -> None:
    split = _split({0, 2, 4}, {1, 3, 5})
    found = perfect_matching(cycle_graph(6), split)
    assert isinstance(found, PerfectMatching)
    assert found.is_valid_for(cycle_graph(6), split)


def test_perfect_matching_reports_hall_violator() -> None:
    h = Graph.from_edges(4, [(0, 2), (1, 2)])
    found = perfect_matching(h, _split({0, 1}, {2, 3}))
    assert isinstance(found, HallViolator)
    assert found.subset == frozenset({0, 1})
    assert found.neighbourhood == frozenset({2})
    assert found.is_valid_for(h)


def test_perfect_matching_rejects_bad_splits() -> None:
    with pytest.raises(HypothesisError):
        perfect_matching(path_graph(3), _split({0}, {1, 2}))
    with pytest.raises(HypothesisError):
        perfect_matching(path_graph(4), _split({0, 1}, {2, 3}))


# ---- Prisms ----


@pytest.mark.parametrize(
    "g",
    [
        co_of(Graph.complete(2), isolated=2),
        cycle_graph(4),
        co_of(path_graph(4), isolated=2),
        Graph.complete(6),
    ],
)
def test_box_product_certificate(g: Graph) -> None:
    cert = box_product_certificate(g)
    assert cert.is_valid_for(g)
    order = cert.ordering()
    assert sorted(order) == list(range(g.n))


def test_box_certificate_rejects_missing_matching_edge() -> None:
    cert = BoxCertificate((0, 1), (2, 3), ((0, 2), (1, 3)))
    assert not cert.is_valid_for(cycle_graph(4))


@pytest.mark.parametrize(
    ("g", "code"),
    [
        (Graph.complete(5), "order_not_even"),
        (co_of(cycle_graph(4), isolated=2), "not_simplified"),
        (co_of(cycle_graph(6)), "complement_edge_bound"),
    ],
)
def test_box_product_certificate_hypotheses(g: Graph, code: str) -> None:
    with pytest.raises(HypothesisError) as err:
        box_product_certificate(g)
    assert err.value.code == code


@pytest.mark.parametrize("n", [4, 6, pytest.param(8, marks=pytest.mark.slow)])
def test_box_product_certificate_exhaustive(n: int) -> None:
    checked = 0
    for g in enumerate_dense_graphs(n, n - 2):
        if not is_simplified(g) or not isinstance(bipartition(complement(g)), PartiteSplit):
            continue
        assert box_product_certificate(g).is_valid_for(g), str(g)
        checked += 1
    assert checked
