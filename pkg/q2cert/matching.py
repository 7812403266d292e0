"""Perfect matchings with Hall-violator witnesses, and spanning prism certificates."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
import logging

import networkx as nx

from .errors import HypothesisError, LemmaContradictionError
from .graph import Graph, OddCycle, PartiteSplit, bipartition, complement, has_cycle
from .structure import is_simplified

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class PerfectMatching:
    pairs: tuple[tuple[int, int], ...]

    def is_valid_for(self, h: Graph, split: PartiteSplit) -> bool:
        lefts = [u for u, _ in self.pairs]
        rights = [v for _, v in self.pairs]
        return (
            set(lefts) == split.left
            and set(rights) == split.right
            and len(self.pairs) == len(split.left)
            and all(h.has_edge(u, v) for u, v in self.pairs)
        )


@dataclass(frozen=True, slots=True)
class HallViolator:
    """A left subset whose neighbourhood is strictly smaller than itself."""

    subset: frozenset[int]
    neighbourhood: frozenset[int]

    def is_valid_for(self, h: Graph) -> bool:
        reached = frozenset(w for v in self.subset for w in h.neighbors(v))
        return reached <= self.neighbourhood and len(self.neighbourhood) < len(self.subset)


def _alternating_reach(
    h: Graph, split: PartiteSplit, mate: dict[int, int]
) -> HallViolator:
    roots = sorted(v for v in split.left if v not in mate)
    seen_left = set(roots)
    seen_right: set[int] = set()
    queue = deque(roots)
    while queue:
        u = queue.popleft()
        for w in h.neighbors(u):
            if w in seen_right:
                continue
            seen_right.add(w)
            partner = mate[w]
            if partner not in seen_left:
                seen_left.add(partner)
                queue.append(partner)
    return HallViolator(frozenset(seen_left), frozenset(seen_right))


def perfect_matching(h: Graph, split: PartiteSplit) -> PerfectMatching | HallViolator:
    """Match ``split.left`` onto ``split.right`` inside ``h`` or return a Hall violator.

    A maximum matching is found with Hopcroft-Karp. When it is not perfect,
    the left vertices reachable from an unmatched left vertex by alternating
    paths form the violator; every right vertex they reach is matched back
    into the set, so the neighbourhood is smaller by the number of roots.
    """
    if len(split.left) != len(split.right):
        raise HypothesisError("unequal_sides", f"{len(split.left)} vs {len(split.right)}")
    if not split.is_valid_for(h):
        raise HypothesisError("invalid_split")

    nxg = h.to_networkx()
    mate = nx.bipartite.hopcroft_karp_matching(nxg, top_nodes=split.left)
    if len(mate) == 2 * len(split.left):
        return PerfectMatching(tuple(sorted((u, mate[u]) for u in split.left)))

    violator = _alternating_reach(h, split, mate)
    _LOGGER.debug(
        "Hall violator %s with neighbourhood %s",
        sorted(violator.subset), sorted(violator.neighbourhood),
    )
    return violator


# ---- Prism certificates ---------------------------------------------------------


@dataclass(frozen=True, slots=True)
class BoxCertificate:
    """Two cliques of order ``n/2`` joined by a perfect matching inside ``g``."""

    side_x: tuple[int, ...]
    side_y: tuple[int, ...]
    matching: tuple[tuple[int, int], ...]

    def is_valid_for(self, g: Graph) -> bool:
        x, y = set(self.side_x), set(self.side_y)
        half = g.n // 2
        if len(x) != half or len(y) != half or x & y or x | y != set(range(g.n)):
            return False
        for side in (self.side_x, self.side_y):
            if not all(g.has_edge(u, v) for i, u in enumerate(side) for v in side[i + 1 :]):
                return False
        return (
            len(self.matching) == half
            and {u for u, _ in self.matching} == x
            and {v for _, v in self.matching} == y
            and all(g.has_edge(u, v) for u, v in self.matching)
        )

    def ordering(self) -> list[int]:
        """Vertex order placing matched pairs at positions ``i`` and ``i + n/2``."""
        return [u for u, _ in self.matching] + [v for _, v in self.matching]


def _cross_graph(g: Graph, split: PartiteSplit) -> Graph:
    return Graph.from_edges(
        g.n, ((u, v) for u, v in g.edges() if (u in split.left) != (v in split.left))
    )


def box_product_certificate(g: Graph) -> BoxCertificate:
    """Exhibit a spanning ``K_{n/2} □ K₂`` in a simplified graph with bipartite complement."""
    n = g.n
    if n < 4 or n % 2:
        raise HypothesisError("order_not_even", str(n))
    gbar = complement(g)
    e = gbar.edge_count
    if not (e <= n - 2 or (e == n - 1 and has_cycle(gbar))):
        raise HypothesisError("complement_edge_bound", f"e={e}, n={n}")
    if not is_simplified(g):
        raise HypothesisError("not_simplified")
    split = bipartition(gbar)
    if isinstance(split, OddCycle):
        raise HypothesisError("complement_not_bipartite", str(split.vertices))
    if split.imbalance:
        raise LemmaContradictionError("unbalanced_sides", {"graph": str(g)})

    found = perfect_matching(_cross_graph(g, split), split)
    if isinstance(found, HallViolator):
        raise LemmaContradictionError(
            "hall_violator",
            {"graph": str(g), "subset": sorted(found.subset), "neighbourhood": sorted(found.neighbourhood)},
        )
    cert = BoxCertificate(
        tuple(u for u, _ in found.pairs), tuple(v for _, v in found.pairs), found.pairs
    )
    if not cert.is_valid_for(g):
        raise LemmaContradictionError("box_certificate_invalid", {"graph": str(g)})
    return cert
