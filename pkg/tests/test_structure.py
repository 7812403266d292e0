from __future__ import annotations

import pytest

from q2cert.errors import HypothesisError
from q2cert.graph import (
    Graph,
    PartiteSplit,
    add_isolated,
    bipartition,
    complement,
    cycle_graph,
    has_cycle,
    path_graph,
    w_graph,
)
from q2cert.oracle import enumerate_dense_graphs
from q2cert.structure import (
    BipartiteRoute,
    SplitWitness,
    StepKind,
    classify_bipartite_complement,
    complement_twins,
    count_isolated,
    cycle_join_shape,
    find_kmn_split,
    find_spanning_split,
    highest_isolated_pair,
    is_simplified,
    peel_dominating,
    simplify,
    validate_simplified_properties,
)

from .graphs import co_of, union


def _split(left: set[int], right: set[int]) -> PartiteSplit:
    return PartiteSplit(frozenset(left), frozenset(right))


def _simplified_with_witness(n: int, slack: int) -> list[tuple[Graph, SplitWitness]]:
    found = []
    for g in enumerate_dense_graphs(n, n - slack):
        gbar = complement(g)
        split = bipartition(gbar)
        if gbar.edge_count == 0 or not isinstance(split, PartiteSplit) or not is_simplified(g):
            continue
        if (found_split := find_spanning_split(gbar, split)) is not None:
            found.append((g, found_split[1]))
    return found


# ---- Twin removal ----


def test_simplify_star_complement() -> None:
    g = co_of(Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)]))
    reduced, trace = simplify(g)
    assert len(trace) == 2
    assert complement(reduced) == Graph.complete(2)
    assert all(step.kind is StepKind.TWIN for step in trace.steps)
    assert trace.replay(reduced) == g


def test_simplify_c4_complement() -> None:
    g = co_of(cycle_graph(4))
    reduced, trace = simplify(g)
    assert len(trace) == 2
    assert complement(reduced) == Graph.complete(2)
    assert trace.replay(reduced) == g


def test_simplify_keeps_simplified_input() -> None:
    g = co_of(path_graph(4), isolated=1)
    assert is_simplified(g)
    reduced, trace = simplify(g)
    assert reduced == g
    assert len(trace) == 0


def test_complement_twins_ignores_isolated_vertices() -> None:
    assert complement_twins(Graph.complete(5)) is None
    assert complement_twins(co_of(cycle_graph(4))) == (0, 2)


def test_trace_replay_detects_wrong_reduced_graph() -> None:
    _, trace = simplify(co_of(cycle_graph(4)))
    with pytest.raises(HypothesisError) as err:
        trace.replay(Graph.empty(2))
    assert err.value.code == "trace_replay_mismatch"


def test_peel_dominating() -> None:
    g = co_of(Graph.complete(2), isolated=3)
    smaller, step = peel_dominating(g, 4, 3)
    assert smaller.n == 4
    assert step.kind is StepKind.DOMINATING
    assert step.undo(smaller) == g
    with pytest.raises(HypothesisError):
        peel_dominating(g, 0, 3)


# ---- Split witnesses ----


def test_find_kmn_split_c4() -> None:
    gbar = cycle_graph(4)
    w = find_kmn_split(gbar, _split({0, 2}, {1, 3}))
    assert w is not None
    assert w.is_valid_for(gbar)


def test_find_kmn_split_two_edges() -> None:
    gbar = Graph.from_edges(4, [(0, 1), (2, 3)])
    w = find_kmn_split(gbar, _split({0, 2}, {1, 3}))
    assert w is not None
    assert w.sizes == (1, 1, 1, 1)


@pytest.mark.parametrize(
    ("gbar", "left", "right"),
    [
        (Graph.complete(2), {0}, {1}),
        (Graph.from_edges(6, [(0, 1), (2, 3), (4, 5)]), {0, 2, 4}, {1, 3, 5}),
    ],
)
def test_find_kmn_split_none(gbar: Graph, left: set[int], right: set[int]) -> None:
    assert find_kmn_split(gbar, _split(left, right)) is None


def test_find_kmn_split_rejects_bad_split() -> None:
    with pytest.raises(HypothesisError):
        find_kmn_split(cycle_graph(4), _split({0, 1}, {2, 3}))
    with pytest.raises(HypothesisError):
        find_kmn_split(Graph.empty(2), _split({0, 1}, set()))


def test_split_witness_normalization() -> None:
    w = SplitWitness(frozenset({0}), frozenset({2}), frozenset(), frozenset({1, 3}))
    norm = w.normalized()
    assert norm.zeroed == "n1"
    assert norm.sizes == (1, 1, 2, 0)
    assert norm.is_valid_for(cycle_graph(4))


def test_validate_simplified_properties_excludes_c4() -> None:
    w = SplitWitness(frozenset({0}), frozenset({2}), frozenset(), frozenset({1, 3}))
    with pytest.raises(HypothesisError) as err:
        validate_simplified_properties(cycle_graph(4), w)
    assert err.value.code == "excluded_graph_c4"


@pytest.mark.parametrize("n", [5, 6, pytest.param(8, marks=pytest.mark.slow)])
def test_validate_simplified_properties_hold(n: int) -> None:
    cases = _simplified_with_witness(n, slack=2)
    assert cases
    for g, w in cases:
        report = validate_simplified_properties(g, w)
        assert report.ok, (str(g), report.assertions)


@pytest.mark.parametrize("n", [6, 7])
def test_count_isolated_finds_two(n: int) -> None:
    for g, _ in _simplified_with_witness(n, slack=3):
        analysis = count_isolated(g)
        assert len(analysis.isolated) >= 2


def test_count_isolated_edge_plus_three_points() -> None:
    analysis = count_isolated(co_of(Graph.complete(2), isolated=3))
    assert analysis.isolated == frozenset({2, 3, 4})
    assert analysis.witness.zeroed == "n2"


def test_count_isolated_needs_a_witness() -> None:
    with pytest.raises(HypothesisError) as err:
        count_isolated(co_of(Graph.from_edges(6, [(0, 1), (2, 3), (4, 5)])))
    assert err.value.code == "no_split_witness"


def test_find_spanning_split_moves_isolated_vertices() -> None:
    gbar = add_isolated(Graph.complete(2), 3)
    split = bipartition(gbar)
    assert isinstance(split, PartiteSplit)
    found = find_spanning_split(gbar, split)
    assert found is not None
    chosen, witness = found
    assert witness.is_valid_for(gbar)
    assert chosen.is_valid_for(gbar)
    assert find_spanning_split(gbar, _split({0, 2, 3, 4}, {1})) is not None


def test_find_spanning_split_none_for_many_components() -> None:
    gbar = Graph.from_edges(6, [(0, 1), (2, 3), (4, 5)])
    assert find_spanning_split(gbar, _split({0, 2, 4}, {1, 3, 5})) is None


# ---- Bipartite decision tree ----


@pytest.mark.parametrize(
    ("g", "route", "params"),
    [
        (path_graph(3), BipartiteRoute.Q3_FAMILY, (0, 0)),
        (co_of(path_graph(4), isolated=1), BipartiteRoute.Q3_FAMILY, (1, 1)),
        (co_of(w_graph(2, extra_leaf=True), isolated=1), BipartiteRoute.NEEDS_REALIZATION, (2,)),
        (co_of(w_graph(3, extra_leaf=True), isolated=1), BipartiteRoute.NEEDS_REALIZATION, (3,)),
    ],
)
def test_classify_bipartite_tight_cases(g: Graph, route: BipartiteRoute, params: tuple[int, ...]) -> None:
    cls = classify_bipartite_complement(g)
    assert cls.route is route
    assert cls.params == params


def test_classify_bipartite_perfect_matching_complement() -> None:
    g = co_of(Graph.from_edges(6, [(0, 1), (2, 3), (4, 5)]))
    assert classify_bipartite_complement(g).route is BipartiteRoute.Q2_BY_NGTHM


def test_classify_bipartite_twins_go_through_reduction() -> None:
    g = co_of(cycle_graph(4), isolated=2)
    cls = classify_bipartite_complement(g)
    assert cls.route is BipartiteRoute.Q2_BY_JDUP_LIFT
    assert cls.reduced is not None
    assert cls.reduced.n % 2 == 0
    assert cls.trace.replay(cls.reduced) == g


def test_classify_bipartite_rejects_dense_complements() -> None:
    with pytest.raises(HypothesisError):
        classify_bipartite_complement(co_of(cycle_graph(6)))


def test_highest_isolated_pair() -> None:
    assert highest_isolated_pair(add_isolated(Graph.complete(2), 3)) == (4, 3)


# ---- Cycle-plus-three shapes ----


@pytest.mark.parametrize(
    ("gbar", "shape"),
    [
        (add_isolated(cycle_graph(5), 3), (5, False)),
        (union(cycle_graph(5), Graph.complete(3), Graph.empty(3)), (5, True)),
        (add_isolated(cycle_graph(5), 2), None),
        (add_isolated(path_graph(5), 3), None),
        (union(cycle_graph(4), cycle_graph(4), Graph.empty(3)), None),
    ],
)
def test_cycle_join_shape(gbar: Graph, shape: tuple[int, bool] | None) -> None:
    assert cycle_join_shape(gbar) == shape


def test_has_cycle_helper() -> None:
    assert has_cycle(cycle_graph(3))
    assert not has_cycle(path_graph(6))
