from __future__ import annotations

import networkx as nx
import pytest

from q2cert.certificate import certificate_to_json
from q2cert.config import Q2CertConfig
from q2cert.const import RouteTag, Verdict
from q2cert.errors import HypothesisError
from q2cert.graph import Graph, add_isolated, complement, double_star, path_graph, w_graph
from q2cert.partition import JoinRoute
from q2cert.pipeline import classify, conjecture_sweep
from q2cert.verifier import verify_certificate

from .graphs import co_of


def test_complete_graph_is_exact_q2() -> None:
    cert = classify(Graph.complete(7))
    assert cert.verdict is Verdict.Q2
    assert cert.routes == (RouteTag.COMPLETE,)
    assert cert.realization is not None
    assert cert.realization.is_exact


def test_perfect_matching_complement_is_q2(config: Q2CertConfig) -> None:
    cert = classify(co_of(Graph.from_edges(6, [(0, 1), (2, 3), (4, 5)])), config)
    assert cert.verdict is Verdict.Q2
    assert cert.routes[0] is RouteTag.NGTHM
    assert "kmn" in cert.witnesses


@pytest.mark.usefixtures("no_search")
def test_tight_tree_complement_uses_m7() -> None:
    g = co_of(w_graph(2, extra_leaf=True), isolated=1)
    cert = classify(g)
    assert cert.verdict is Verdict.Q2
    assert cert.routes[0] is RouteTag.TIGHT_CHAR
    assert RouteTag.M7_ROUTE in cert.routes
    assert "split" in cert.witnesses
    assert verify_certificate(cert).ok


@pytest.mark.usefixtures("no_search")
def test_edge_plus_points_uses_the_join() -> None:
    g = co_of(Graph.complete(2), isolated=4)
    cert = classify(g)
    assert cert.verdict is Verdict.Q2
    assert cert.routes[0] is RouteTag.LB1
    assert {"join", "partition"} <= set(cert.witnesses)


@pytest.mark.usefixtures("no_search")
def test_odd_order_join_verifies() -> None:
    cert = classify(co_of(Graph.complete(2), isolated=5))
    assert cert.verdict is Verdict.Q2
    assert cert.routes[0] is RouteTag.LB1
    assert cert.witnesses["join"]["removed"] is not None
    assert verify_certificate(cert).ok


@pytest.mark.parametrize(
    ("g", "params"),
    [
        (path_graph(3), [0, 0]),
        (co_of(add_isolated(double_star(2, 1))), [2, 1]),
        (co_of(path_graph(4), isolated=1), [1, 1]),
    ],
)
def test_double_star_family_is_q3(g: Graph, params: list[int]) -> None:
    cert = classify(g)
    assert cert.verdict is Verdict.Q3
    assert cert.routes == (RouteTag.TIGHT_CHAR, RouteTag.UNIQUE_P2)
    assert cert.witnesses["family"]["params"] == params
    assert verify_certificate(cert).ok


def test_unique_path_outside_the_family_searches(config: Q2CertConfig) -> None:
    cert = classify(path_graph(4), config)
    assert cert.verdict in (Verdict.Q3, Verdict.UNKNOWN)
    assert RouteTag.UNIQUE_P2 in cert.routes


def test_classification_is_deterministic(config: Q2CertConfig) -> None:
    g = co_of(Graph.from_edges(6, [(0, 1), (2, 3), (4, 5)]))
    assert certificate_to_json(classify(g, config)) == certificate_to_json(classify(g, config))


def test_exact_only_reports_unknown_instead_of_searching() -> None:
    g = co_of(Graph.from_edges(6, [(0, 1), (2, 3), (4, 5)]))
    cert = classify(g, Q2CertConfig(exact_only=True))
    assert cert.verdict is Verdict.UNKNOWN
    assert any(note.startswith("bipartite:") for note in cert.notes)


@pytest.mark.parametrize("g", [Graph.empty(3), Graph.empty(1)])
def test_rejects_small_or_disconnected(g: Graph) -> None:
    with pytest.raises(HypothesisError):
        classify(g)


# ---- Sweeps ----


def test_sweep_order_five(config: Q2CertConfig) -> None:
    report = conjecture_sweep(5, config=config)
    assert report.max_complement_edges == 3
    assert [row.classes for row in report.rows] == [1, 1, 2, 4]
    assert all(row.skipped == 0 for row in report.rows)
    assert report.rows[3].q3 == 2
    assert sum(row.q2 for row in report.rows[:3]) == 4


@pytest.mark.parametrize("n", [6, pytest.param(7, marks=pytest.mark.slow), pytest.param(8, marks=pytest.mark.slow)])
def test_sweep_certifies_sparse_complements(n: int, config: Q2CertConfig) -> None:
    report = conjecture_sweep(n, config=config)
    for row in report.rows[: n - 2]:
        assert row.q2 + row.skipped == row.classes
    assert report.as_dict()["n"] == n


def _random_join_graph(n: int, seed: int) -> Graph:
    edges = max(1, n // 2 - 1)
    return complement(Graph.from_networkx(nx.gnm_random_graph(n, edges, seed=seed)))


def _assert_join_certified(g: Graph) -> None:
    cert = classify(g)
    assert cert.verdict is Verdict.Q2, cert.notes
    assert cert.routes[0] is RouteTag.LB1
    odd = JoinRoute(cert.witnesses["join"]["route"]) is JoinRoute.ODD_VIA_JDUP
    assert odd == bool(g.n % 2)
    assert verify_certificate(cert).ok


@pytest.mark.parametrize("n", range(6, 15))
def test_random_sparse_complements_use_the_join(n: int) -> None:
    _assert_join_certified(_random_join_graph(n, seed=n))


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(500))
def test_random_sparse_complements_are_q2(seed: int) -> None:
    _assert_join_certified(_random_join_graph(6 + seed % 9, seed))
