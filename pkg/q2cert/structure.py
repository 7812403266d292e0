"""Complement-side structure: twin reduction, spanning splits and the bipartite decision tree."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import StrEnum
from itertools import product
import logging

import networkx as nx

from .errors import HypothesisError, LemmaContradictionError
from .graph import (
    FamilyKind,
    Graph,
    OddCycle,
    PartiteSplit,
    bipartition,
    complement,
    components,
    has_cycle,
    jdup,
    recognize,
)

_LOGGER = logging.getLogger(__name__)


# ---- Twin reduction -------------------------------------------------------------


class StepKind(StrEnum):
    TWIN = "twin"
    DOMINATING = "dominating"


@dataclass(frozen=True, slots=True)
class ReductionStep:
    """One removal; ``removed`` and ``kept`` are labels in the graph before it."""

    kind: StepKind
    removed: int
    kept: int
    graph_before_hash: str

    @property
    def kept_after(self) -> int:
        """Label of the kept vertex once ``removed`` is gone."""
        return self.kept if self.kept < self.removed else self.kept - 1

    def reinsert_perm(self, n_after: int) -> list[int]:
        """Map ``jdup`` output labels back onto the labels before removal."""
        perm = [v if v < self.removed else v + 1 for v in range(n_after)]
        perm.append(self.removed)
        return perm

    def undo(self, g: Graph) -> Graph:
        return jdup(g, self.kept_after).relabel(self.reinsert_perm(g.n))


@dataclass(frozen=True, slots=True)
class ReductionTrace:
    steps: tuple[ReductionStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def replay(self, reduced: Graph) -> Graph:
        """Rebuild the original graph, checking every intermediate fingerprint."""
        g = reduced
        for step in reversed(self.steps):
            g = step.undo(g)
            if g.digest() != step.graph_before_hash:
                raise HypothesisError("trace_replay_mismatch", str(step))
        return g


def complement_twins(g: Graph) -> tuple[int, int] | None:
    """Lexicographically first pair of non-isolated complement vertices with equal neighbourhoods."""
    gbar = complement(g)
    for x in range(g.n):
        if not gbar.rows[x]:
            continue
        for y in range(x + 1, g.n):
            if gbar.rows[y] == gbar.rows[x]:
                return (x, y)
    return None


def is_simplified(g: Graph) -> bool:
    return complement_twins(g) is None


def simplify(g: Graph) -> tuple[Graph, ReductionTrace]:
    """Remove complement twins until none remain.

    The lower-labelled vertex of each pair is removed; the result satisfies
    ``jdup(result, kept) == g`` step by step.
    """
    steps: list[ReductionStep] = []
    current = g
    while (pair := complement_twins(current)) is not None:
        removed, kept = pair
        before_edges = complement(current).edge_count
        steps.append(ReductionStep(StepKind.TWIN, removed, kept, current.digest()))
        current = current.remove_vertex(removed)
        if complement(current).edge_count >= before_edges:
            raise LemmaContradictionError("twin_removal_kept_edges", {"graph": str(g)})
        _LOGGER.debug("Removed complement twin %d (kept %d)", removed, kept)
    return current, ReductionTrace(tuple(steps))


def peel_dominating(g: Graph, removed: int, kept: int) -> tuple[Graph, ReductionStep]:
    """Remove one of two dominating vertices; the other regenerates it by ``jdup``."""
    full = (1 << g.n) - 1
    for v in (removed, kept):
        if g.rows[v] | (1 << v) != full:
            raise HypothesisError("vertex_not_dominating", str(v))
    return g.remove_vertex(removed), ReductionStep(StepKind.DOMINATING, removed, kept, g.digest())


# ---- Spanning K_{m1,n1} ∪ K_{m2,n2} splits ---------------------------------------


@dataclass(frozen=True, slots=True)
class SplitWitness:
    """Groups of the two partite sides; ``M1×N1`` and ``M2×N2`` are complete in the complement."""

    m1: frozenset[int]
    m2: frozenset[int]
    n1: frozenset[int]
    n2: frozenset[int]
    zeroed: str | None = None

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        return (len(self.m1), len(self.m2), len(self.n1), len(self.n2))

    def is_valid_for(self, gbar: Graph) -> bool:
        parts = (self.m1, self.m2, self.n1, self.n2)
        if sum(map(len, parts)) != gbar.n or frozenset().union(*parts) != frozenset(range(gbar.n)):
            return False
        m1, m2, n1, n2 = self.sizes
        if m1 * m2 == 0 and n1 * n2 == 0:
            return False
        blocks = ((self.m1, self.n1), (self.m2, self.n2))
        return all(gbar.has_edge(r, s) for left, right in blocks for r in left for s in right)

    def normalized(self) -> SplitWitness:
        """Relabel so that ``N2`` is empty, recording which part was empty."""
        m1, m2, n1, n2 = self.sizes
        if n2 == 0:
            return SplitWitness(self.m1, self.m2, self.n1, self.n2, "n2")
        if n1 == 0:
            return SplitWitness(self.m2, self.m1, self.n2, self.n1, "n1")
        if m2 == 0:
            return SplitWitness(self.n1, self.n2, self.m1, self.m2, "m2")
        if m1 == 0:
            return SplitWitness(self.n2, self.n1, self.m2, self.m1, "m1")
        raise HypothesisError("no_empty_part", str(self.sizes))


def missing_cross_components(
    gbar: Graph, split: PartiteSplit
) -> list[frozenset[int]]:
    """Components of the graph of cross pairs that are not complement edges."""
    h = nx.Graph()
    h.add_nodes_from(range(gbar.n))
    h.add_edges_from(
        (r, s) for r in split.left for s in split.right if not gbar.has_edge(r, s)
    )
    comps = [frozenset(c) for c in nx.connected_components(h)]
    return sorted(comps, key=min)


def find_kmn_split(gbar: Graph, split: PartiteSplit) -> SplitWitness | None:
    """Find a spanning ``K_{m1,n1} ∪ K_{m2,n2}`` in ``gbar`` or prove none exists.

    A missing cross pair forces its ends into different groups, so every
    component of the missing-pair graph has exactly two admissible group
    assignments. A nontrivial witness exists iff at least two components
    meet the left side or at least two meet the right side.
    """
    if not split.is_valid_for(gbar):
        raise HypothesisError("invalid_split")
    if not split.left or not split.right:
        raise HypothesisError("empty_side")

    comps = missing_cross_components(gbar, split)
    with_left = [c for c in comps if c & split.left]
    with_right = [c for c in comps if c & split.right]
    flips: dict[frozenset[int], int] = dict.fromkeys(comps, 0)
    if len(with_left) >= 2:
        for i, c in enumerate(with_left):
            flips[c] = i % 2
    elif len(with_right) >= 2:
        for c in with_right[1:]:
            flips[c] = 1
    else:
        return None

    groups: dict[int, int] = {}
    for c, f in flips.items():
        for v in c:
            groups[v] = 1 + f if v in split.left else 2 - f
    witness = SplitWitness(
        frozenset(v for v in split.left if groups[v] == 1),
        frozenset(v for v in split.left if groups[v] == 2),
        frozenset(v for v in split.right if groups[v] == 1),
        frozenset(v for v in split.right if groups[v] == 2),
    )
    if not witness.is_valid_for(gbar):
        raise LemmaContradictionError("split_witness_invalid", {"sizes": witness.sizes})
    return witness


def _witness_splits(gbar: Graph, split: PartiteSplit) -> Iterator[PartiteSplit]:
    yield split
    nontrivial = [c for c in components(gbar) if len(c) > 1]
    isolated = frozenset(gbar.isolated_vertices())
    # an isolated vertex forces its partner group empty, which leaves room
    # for one non-trivial component; four full groups cover at most two
    if not nontrivial or len(nontrivial) > 2 or (len(nontrivial) == 2 and isolated):
        return
    sides = [(c & split.left, c & split.right) for c in nontrivial]
    for flips in product((False, True), repeat=len(sides) - 1):
        left: set[int] = set()
        right: set[int] = set()
        for (a, b), flip in zip(sides, (False, *flips), strict=True):
            left |= b if flip else a
            right |= a if flip else b
        yield PartiteSplit(frozenset(left | isolated), frozenset(right))
        yield PartiteSplit(frozenset(left), frozenset(right | isolated))


def find_spanning_split(
    gbar: Graph, split: PartiteSplit
) -> tuple[PartiteSplit, SplitWitness] | None:
    """Look for a witness over every bipartition of ``gbar``, not only ``split``.

    Component orientations and the placement of isolated vertices change the
    answer of :func:`find_kmn_split`; only the candidates that can carry a
    witness are tried, ``split`` first.
    """
    seen: set[tuple[frozenset[int], frozenset[int]]] = set()
    for candidate in _witness_splits(gbar, split):
        key = (candidate.left, candidate.right)
        if key in seen or not candidate.left or not candidate.right:
            continue
        seen.add(key)
        if (witness := find_kmn_split(gbar, candidate)) is not None:
            return candidate, witness
    return None


# ---- Simplified-graph properties ------------------------------------------------


@dataclass(frozen=True, slots=True)
class Assertion:
    name: str
    holds: bool
    detail: str


@dataclass(frozen=True, slots=True)
class SimplifiedReport:
    witness: SplitWitness
    assertions: tuple[Assertion, ...]

    @property
    def ok(self) -> bool:
        return all(a.holds for a in self.assertions)


def _is_c4(g: Graph) -> bool:
    return recognize(g).kind is FamilyKind.C4


def _require_simplified_bipartite(g: Graph, *, strict_bound: bool) -> tuple[Graph, PartiteSplit]:
    gbar = complement(g)
    e, n = gbar.edge_count, g.n
    limit = n - 3 if strict_bound else n - 2
    if not (e <= limit or (e == limit + 1 and has_cycle(gbar))):
        raise HypothesisError("complement_edge_bound", f"e={e}, n={n}")
    if e == 0:
        raise HypothesisError("complement_empty")
    if not is_simplified(g):
        raise HypothesisError("not_simplified")
    split = bipartition(gbar)
    if isinstance(split, OddCycle):
        raise HypothesisError("complement_not_bipartite", str(split.vertices))
    return gbar, split


def validate_simplified_properties(g: Graph, w: SplitWitness) -> SimplifiedReport:
    """Check the four structural consequences of being simplified for a split witness."""
    if _is_c4(g):
        raise HypothesisError("excluded_graph_c4")
    gbar, _ = _require_simplified_bipartite(g, strict_bound=False)
    if not w.is_valid_for(gbar):
        raise HypothesisError("invalid_split_witness")
    n = g.n
    zero = min(w.sizes) == 0
    norm = w.normalized() if zero else w
    m1, _, n1, _ = norm.sizes
    isolated = len(gbar.isolated_vertices())
    assertions = [
        Assertion("some_part_empty", zero, f"sizes {w.sizes}, zeroed {norm.zeroed}"),
        Assertion("m1_is_one", m1 == 1, f"m1={m1}"),
    ]
    if n % 2 == 0:
        assertions.append(Assertion("n1_at_most_half_minus_one", n1 <= n // 2 - 1, f"n1={n1}"))
        assertions.append(
            Assertion("enough_isolated", isolated >= n // 2 - n1, f"isolated={isolated}, n1={n1}")
        )
    return SimplifiedReport(norm, tuple(assertions))


@dataclass(frozen=True, slots=True)
class SimplifiedAnalysis:
    """The complement-degree classes ``I``, ``V¹`` and ``V²`` of the larger group ``M2``."""

    witness: SplitWitness
    isolated: frozenset[int]
    deg1: frozenset[int]
    deg2plus: frozenset[int]


def count_isolated(g: Graph) -> SimplifiedAnalysis:
    """Split ``M2`` by complement degree; at least two vertices must be isolated."""
    gbar, split = _require_simplified_bipartite(g, strict_bound=True)
    if g.n < 4:
        raise HypothesisError("graph_too_small", str(g.n))
    found = find_spanning_split(gbar, split) if split.left and split.right else None
    if found is None:
        raise HypothesisError("no_split_witness")
    norm = found[1].normalized()
    degree = {v: gbar.degree(v) for v in norm.m2}
    analysis = SimplifiedAnalysis(
        norm,
        frozenset(v for v, d in degree.items() if d == 0),
        frozenset(v for v, d in degree.items() if d == 1),
        frozenset(v for v, d in degree.items() if d >= 2),
    )
    if len(analysis.isolated) < 2:
        raise LemmaContradictionError("too_few_isolated", {"graph": str(g)})
    return analysis


# ---- Decision tree for bipartite complements ------------------------------------


class BipartiteRoute(StrEnum):
    Q2_BY_NGTHM = "Q2ByNGThm"
    Q2_BY_BOX_PRODUCT = "Q2ByBoxProduct"
    Q2_BY_JDUP_LIFT = "Q2ByJdupLift"
    Q3_FAMILY = "Q3Family"
    NEEDS_REALIZATION = "NeedsRealization"


@dataclass(frozen=True, slots=True)
class BipartiteClassification:
    """Outcome of the bipartite decision tree, with everything needed to realize it.

    ``reduced`` is the simplified graph; ``peeled`` holds the complement-isolated
    pair ``(w, z)`` removed from it when its order is odd.
    """

    route: BipartiteRoute
    split: PartiteSplit
    witness: SplitWitness | None = None
    reduced: Graph | None = None
    trace: ReductionTrace = field(default_factory=ReductionTrace)
    peeled: tuple[int, int] | None = None
    params: tuple[int, ...] = ()


def highest_isolated_pair(gbar: Graph) -> tuple[int, int]:
    isolated = gbar.isolated_vertices()
    if len(isolated) < 2:
        raise LemmaContradictionError("too_few_isolated", {"complement": str(gbar)})
    return isolated[-1], isolated[-2]


def classify_bipartite_complement(g: Graph) -> BipartiteClassification:
    """Walk the decision tree for a graph whose complement is bipartite with ``e ≤ n − 2``."""
    gbar = complement(g)
    n, e = g.n, gbar.edge_count
    if n < 3 or e > n - 2:
        raise HypothesisError("bipartite_route_hypotheses", f"n={n}, e={e}")
    split = bipartition(gbar)
    if isinstance(split, OddCycle):
        raise HypothesisError("complement_not_bipartite", str(split.vertices))

    found = find_spanning_split(gbar, split) if split.left and split.right else None
    if found is None:
        return BipartiteClassification(BipartiteRoute.Q2_BY_NGTHM, split)
    witness = found[1]

    reduced, trace = simplify(g)
    rbar = complement(reduced)
    n_red, e_red = reduced.n, rbar.edge_count
    route = BipartiteRoute.Q2_BY_JDUP_LIFT if len(trace) else BipartiteRoute.Q2_BY_BOX_PRODUCT

    if n_red % 2 == 0:
        return BipartiteClassification(route, split, witness, reduced, trace)
    if e_red <= n_red - 3 or has_cycle(rbar):
        return BipartiteClassification(
            route, split, witness, reduced, trace, peeled=highest_isolated_pair(rbar)
        )

    family = recognize(gbar)
    if n_red == 3 or (n_red == 5 and recognize(rbar).kind is FamilyKind.SAB_UNION_K1):
        if family.kind is not FamilyKind.SAB_UNION_K1:
            raise LemmaContradictionError("tight_family_mismatch", {"graph": str(g)})
        return BipartiteClassification(
            BipartiteRoute.Q3_FAMILY, split, witness, reduced, trace, params=family.params
        )
    reduced_family = recognize(rbar)
    if reduced_family.kind is not FamilyKind.W_PLUS_UNION_K1:
        raise LemmaContradictionError("w_tree_expected", {"reduced": str(reduced)})
    return BipartiteClassification(
        BipartiteRoute.NEEDS_REALIZATION, split, witness, reduced, trace, params=reduced_family.params
    )


def cycle_join_shape(gbar: Graph) -> tuple[int, bool] | None:
    """``(m, with_triangle)`` when the complement is ``C_m ∪ 3K_1``, possibly plus a disjoint ``K_3``."""
    comps = components(gbar)
    singles = sum(1 for c in comps if len(c) == 1)
    cycles = [c for c in comps if len(c) > 1]
    if singles != 3 or not 1 <= len(cycles) <= 2:
        return None
    if any(len(c) < 3 or any(gbar.degree(v) != 2 for v in c) for c in cycles):
        return None
    if len(cycles) == 1:
        return len(cycles[0]), False
    short, long = sorted(map(len, cycles))
    return (long, True) if short == 3 else None
