"""Ground truth for small graphs: structural lower bounds, witnessed upper bounds and enumeration."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction
import logging

import networkx as nx

from .config import Q2CertConfig
from .const import Construction
from .errors import ConstructionError, HypothesisError
from .factory import ortho_complete
from .graph import Graph, complement, unique_p2_violations
from .optimize import generic_q2_search, three_eigenvalue_search
from .realization import Realization, verify_realization

_LOGGER = logging.getLogger(__name__)

MAX_ORACLE_VERTICES = 10
MAX_ENUMERATION_VERTICES = 8


@dataclass(frozen=True, slots=True)
class QBounds:
    """``lower ≤ q(G) ≤ upper`` with the reason for each side."""

    lower: int
    lower_reason: str
    upper: int
    upper_reason: str
    witness: Realization | None = None
    lower_witness: tuple[int, int, int] | None = None

    @property
    def conclusive(self) -> bool:
        return self.lower == self.upper


def diagonal_witness(g: Graph, config: Q2CertConfig | None = None) -> Realization:
    """Adjacency plus ``diag(2n·i)``: disjoint Gershgorin discs give ``n`` eigenvalues."""
    n = g.n
    exact = tuple(
        tuple(Fraction(2 * n * i) if i == j else Fraction(int(g.has_edge(i, j))) for j in range(n))
        for i in range(n)
    )
    r = Realization.from_exact(exact, g, Construction.DIAGONAL)
    return verify_realization(r, config or Q2CertConfig(), distinct=n, require_ssp=False)


def q_bounds(g: Graph, budget: int | None = None, config: Q2CertConfig | None = None) -> QBounds:
    """Bracket ``q(g)`` using structural lower bounds and searched upper bounds.

    A failed search never raises the lower bound; wide bounds are a valid result.
    """
    cfg = config or Q2CertConfig()
    if g.n > MAX_ORACLE_VERTICES:
        raise HypothesisError("oracle_graph_too_large", str(g.n))
    if not g.is_connected():
        raise HypothesisError("graph_disconnected")
    if g.edge_count == 0:
        return QBounds(1, "no_edges", 1, "no_edges")

    violations = unique_p2_violations(g)
    lower, lower_reason = (3, "unique_p2") if violations else (2, "has_edges")
    lower_witness = violations[0] if violations else None

    if lower == 2:
        if complement(g).edge_count == 0:
            return QBounds(2, lower_reason, 2, "complete", ortho_complete(g.n, cfg))
        found = generic_q2_search(g, budget, config=cfg)
        if found.found:
            return QBounds(2, lower_reason, 2, "q2_search", found.realization)

    three = three_eigenvalue_search(g, budget, config=cfg)
    if three.found:
        return QBounds(lower, lower_reason, 3, "q3_search", three.realization, lower_witness)

    try:
        witness = diagonal_witness(g, cfg)
    except ConstructionError as err:
        _LOGGER.warning("Diagonal witness for %s failed: %s", g, err.code)
        witness = None
    return QBounds(lower, lower_reason, g.n, "diagonal", witness, lower_witness)


# ---- Enumeration ----------------------------------------------------------------


def _canonical_bucket(h: nx.Graph) -> str:
    return nx.weisfeiler_lehman_graph_hash(h, iterations=3)


def enumerate_dense_graphs(n: int, max_complement_edges: int) -> Iterator[Graph]:
    """One graph per isomorphism class with at most ``max_complement_edges`` complement edges.

    Complements are grown one edge at a time from the previous level's
    representatives; duplicates are rejected by hash bucket and an exact
    isomorphism test.
    """
    if not 1 <= n <= MAX_ENUMERATION_VERTICES:
        raise HypothesisError("enumeration_order_out_of_range", str(n))
    level = [Graph.empty(n)]
    yield complement(level[0])
    for _ in range(min(max_complement_edges, n * (n - 1) // 2)):
        buckets: dict[str, list[nx.Graph]] = {}
        nxt: list[Graph] = []
        for h in level:
            for u, v in h.non_edges():
                cand = Graph(n, tuple(
                    row | (1 << v) if i == u else row | (1 << u) if i == v else row
                    for i, row in enumerate(h.rows)
                ))
                cnx = cand.to_networkx()
                bucket = buckets.setdefault(_canonical_bucket(cnx), [])
                if any(nx.is_isomorphic(cnx, other) for other in bucket):
                    continue
                bucket.append(cnx)
                nxt.append(cand)
        _LOGGER.debug("Order %d: %d classes with %d complement edges", n, len(nxt), nxt[0].edge_count if nxt else -1)
        yield from (complement(h) for h in nxt)
        level = nxt
