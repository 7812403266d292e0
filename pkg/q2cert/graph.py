"""Labeled simple graphs, the graph6 codec and elementary graph operations.

Vertices are ``0..n-1``. Adjacency is stored as one integer bitset per vertex,
which keeps graphs hashable and cheap to compare; anything needing real graph
algorithms (isomorphism, matchings, components) goes through networkx.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from enum import StrEnum
import hashlib
import logging

import networkx as nx

from .const import GRAPH6_HEADER, MAX_VERTICES
from .errors import GraphFormatError, HypothesisError

_LOGGER = logging.getLogger(__name__)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---- Graph ----------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Graph:
    """Labeled simple graph on ``0..n-1`` with adjacency bitset rows."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 0 <= self.n <= MAX_VERTICES:
            raise HypothesisError("vertex_count_out_of_range", str(self.n))
        if len(self.rows) != self.n:
            raise HypothesisError("row_count_mismatch")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.rows):
            if row & ~full or (row >> v) & 1:
                raise HypothesisError("invalid_adjacency_row", str(v))
            for u in _bits(row):
                if not (self.rows[u] >> v) & 1:
                    raise HypothesisError("asymmetric_adjacency", f"{u}-{v}")

    # -- constructors

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise HypothesisError("invalid_edge", f"{u}-{v}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def from_networkx(cls, h: nx.Graph) -> Graph:
        """Convert a networkx graph, labeling its nodes in sorted order."""
        order = sorted(h.nodes)
        index = {node: i for i, node in enumerate(order)}
        return cls.from_edges(len(order), ((index[a], index[b]) for a, b in h.edges))

    # -- queries

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(_bits(self.rows[v]))

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, row in enumerate(self.rows):
            for v in _bits(row >> (u + 1) << (u + 1)):
                yield (u, v)

    def non_edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if not (self.rows[u] >> v) & 1:
                    yield (u, v)

    def isolated_vertices(self) -> tuple[int, ...]:
        return tuple(v for v, row in enumerate(self.rows) if not row)

    def is_connected(self) -> bool:
        return self.n > 0 and len(components(self)) == 1

    def to_networkx(self) -> nx.Graph:
        h = nx.Graph()
        h.add_nodes_from(range(self.n))
        h.add_edges_from(self.edges())
        return h

    def digest(self) -> str:
        """Short stable fingerprint of the labeled graph."""
        return hashlib.sha256(write_graph6(self).encode("ascii")).hexdigest()[:16]

    # -- derived graphs

    def induced(self, vertices: Iterable[int]) -> Graph:
        """Induced subgraph, relabeled by the sorted order of ``vertices``."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        return Graph.from_edges(
            len(keep),
            ((index[u], index[v]) for u, v in self.edges() if u in index and v in index),
        )

    def remove_vertex(self, v: int) -> Graph:
        return self.induced(u for u in range(self.n) if u != v)

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Rename vertex ``old`` to ``perm[old]``."""
        if sorted(perm) != list(range(self.n)):
            raise HypothesisError("not_a_permutation")
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges()))

    def __str__(self) -> str:
        return write_graph6(self)


# ---- graph6 ---------------------------------------------------------------------


def _decode_order(raw: bytes, offset: int) -> tuple[int, int]:
    if raw[0] != 126:
        return raw[0] - 63, 1
    if len(raw) < 4:
        raise GraphFormatError("truncated_order", offset + len(raw))
    if raw[1] != 126:
        return (raw[1] - 63) << 12 | (raw[2] - 63) << 6 | (raw[3] - 63), 4
    if len(raw) < 8:
        raise GraphFormatError("truncated_order", offset + len(raw))
    n = 0
    for c in raw[2:8]:
        n = n << 6 | (c - 63)
    return n, 8


def parse_graph6(text: str | bytes) -> Graph:
    """Decode one graph6 word.

    An optional ``>>graph6<<`` header and surrounding whitespace are accepted.
    Malformed input raises :class:`GraphFormatError` carrying the byte offset
    of the first offending position.
    """
    if isinstance(text, str):
        try:
            raw = text.encode("ascii")
        except UnicodeEncodeError as err:
            raise GraphFormatError("non_ascii_character", err.start) from err
    else:
        raw = bytes(text)
    raw = raw.strip()
    offset = 0
    if raw.startswith(GRAPH6_HEADER):
        raw = raw[len(GRAPH6_HEADER) :]
        offset = len(GRAPH6_HEADER)
    if not raw:
        raise GraphFormatError("empty_graph6", offset)
    for i, c in enumerate(raw):
        if not 63 <= c <= 126:
            raise GraphFormatError("character_out_of_range", offset + i)

    n, order_len = _decode_order(raw, offset)
    if n > MAX_VERTICES:
        raise GraphFormatError("too_many_vertices", offset)
    expected = (n * (n - 1) // 2 + 5) // 6
    body = len(raw) - order_len
    if body < expected:
        raise GraphFormatError("truncated_bit_field", offset + len(raw))
    if body > expected:
        raise GraphFormatError("trailing_bytes", offset + order_len + expected)
    if (pad := 6 * expected - n * (n - 1) // 2) and (raw[-1] - 63) & ((1 << pad) - 1):
        raise GraphFormatError("nonzero_padding", offset + len(raw) - 1)

    return Graph.from_networkx(nx.from_graph6_bytes(raw))


def write_graph6(g: Graph) -> str:
    """Encode ``g`` as a graph6 word without header or newline."""
    word: bytes = nx.to_graph6_bytes(g.to_networkx(), nodes=range(g.n), header=False)
    return word.decode("ascii").strip()


# ---- Graph operations -----------------------------------------------------------


def complement(g: Graph) -> Graph:
    full = (1 << g.n) - 1
    return Graph(g.n, tuple(full ^ row ^ (1 << v) for v, row in enumerate(g.rows)))


def disjoint_union(g: Graph, h: Graph) -> Graph:
    """``g + h``; the vertices of ``h`` follow those of ``g``."""
    return Graph(g.n + h.n, g.rows + tuple(row << g.n for row in h.rows))


def join(g: Graph, h: Graph) -> Graph:
    """``g ∨ h``; every vertex of ``g`` becomes adjacent to every vertex of ``h``."""
    g_all = (1 << g.n) - 1
    h_all = ((1 << h.n) - 1) << g.n
    return Graph(
        g.n + h.n,
        tuple(row | h_all for row in g.rows) + tuple((row << g.n) | g_all for row in h.rows),
    )


def jdup(g: Graph, v: int) -> Graph:
    """Add vertex ``n`` adjacent to the closed neighbourhood of ``v``."""
    if not 0 <= v < g.n:
        raise HypothesisError("vertex_out_of_range", str(v))
    closed = g.rows[v] | (1 << v)
    new = 1 << g.n
    rows = [row | new if (closed >> u) & 1 else row for u, row in enumerate(g.rows)]
    rows.append(closed)
    return Graph(g.n + 1, tuple(rows))


def components(g: Graph) -> list[frozenset[int]]:
    """Connected components, largest first, ties broken lexicographically."""
    parts = [frozenset(c) for c in nx.connected_components(g.to_networkx())]
    return sorted(parts, key=lambda c: (-len(c), sorted(c)))


def unique_p2_violations(g: Graph) -> list[tuple[int, int, int]]:
    """Triples ``(x, u, y)`` where nonadjacent ``x, y`` share only neighbour ``u``."""
    if not g.is_connected():
        raise HypothesisError("graph_disconnected")
    found: list[tuple[int, int, int]] = []
    for x, y in g.non_edges():
        common = g.rows[x] & g.rows[y]
        if common.bit_count() == 1:
            found.append((x, common.bit_length() - 1, y))
    return found


def has_cycle(g: Graph) -> bool:
    return g.edge_count > g.n - len(components(g))


# ---- Bipartition ----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PartiteSplit:
    """Two vertex classes with no edge inside either class."""

    left: frozenset[int]
    right: frozenset[int]

    @property
    def imbalance(self) -> int:
        return abs(len(self.left) - len(self.right))

    def is_valid_for(self, g: Graph) -> bool:
        if self.left & self.right or self.left | self.right != frozenset(range(g.n)):
            return False
        return not any(
            (u in self.left) == (v in self.left) for u, v in g.edges()
        )


@dataclass(frozen=True, slots=True)
class OddCycle:
    """Witness that a graph is not bipartite."""

    vertices: tuple[int, ...]

    def is_valid_for(self, g: Graph) -> bool:
        k = len(self.vertices)
        return (
            k % 2 == 1
            and len(set(self.vertices)) == k
            and all(g.has_edge(self.vertices[i], self.vertices[(i + 1) % k]) for i in range(k))
        )


def _walk_to_root(parent: dict[int, int], v: int) -> list[int]:
    path = [v]
    while parent[path[-1]] >= 0:
        path.append(parent[path[-1]])
    return path


def _odd_cycle(parent: dict[int, int], u: int, w: int) -> OddCycle:
    up = _walk_to_root(parent, u)
    seen = set(up)
    wp = [w]
    while wp[-1] not in seen:
        wp.append(parent[wp[-1]])
    meet = wp[-1]
    return OddCycle(tuple(up[: up.index(meet) + 1] + wp[-2::-1]))


def _balanced_orientation(diffs: Sequence[int], isolated: int) -> list[int]:
    """Choose a sign per component so that the side difference is coverable."""
    reach: dict[int, tuple[int, ...]] = {0: ()}
    for d in diffs:
        nxt: dict[int, tuple[int, ...]] = {}
        for total, signs in reach.items():
            for sign in (1, -1):
                nxt.setdefault(total + sign * d, (*signs, sign))
        reach = nxt
    best = min(reach, key=lambda t: (max(abs(t) - isolated, 0), abs(t), -t))
    return list(reach[best])


def bipartition(g: Graph) -> PartiteSplit | OddCycle:
    """Two-colour ``g`` so the classes are as equal in size as possible.

    Returns
    -------
    PartiteSplit | OddCycle
        A split with the smallest achievable imbalance, or an odd cycle when
        ``g`` is not bipartite. Isolated vertices fill the smaller side, ties
        going to the left.
    """
    color: dict[int, int] = {}
    parent: dict[int, int] = {}
    classes: list[tuple[frozenset[int], frozenset[int]]] = []
    isolated: list[int] = []

    for comp in components(g):
        if len(comp) == 1:
            isolated.extend(comp)
            continue
        root = min(comp)
        color[root] = 0
        parent[root] = -1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if w not in color:
                    color[w] = 1 - color[u]
                    parent[w] = u
                    queue.append(w)
                elif color[w] == color[u]:
                    cycle = _odd_cycle(parent, u, w)
                    _LOGGER.debug("Odd cycle %s found in %s", cycle.vertices, g)
                    return cycle
        classes.append(
            (
                frozenset(v for v in comp if color[v] == 0),
                frozenset(v for v in comp if color[v] == 1),
            )
        )

    signs = _balanced_orientation([len(a) - len(b) for a, b in classes], len(isolated))
    left: set[int] = set()
    right: set[int] = set()
    for (a, b), sign in zip(classes, signs, strict=True):
        left |= a if sign > 0 else b
        right |= b if sign > 0 else a
    for v in sorted(isolated):
        (left if len(left) <= len(right) else right).add(v)
    return PartiteSplit(frozenset(left), frozenset(right))


# ---- Named families -------------------------------------------------------------


def path_graph(k: int) -> Graph:
    return Graph.from_edges(k, ((i, i + 1) for i in range(k - 1)))


def cycle_graph(m: int) -> Graph:
    if m < 3:
        raise HypothesisError("cycle_too_short", str(m))
    return Graph.from_edges(m, ((i, (i + 1) % m) for i in range(m)))


def double_star(a: int, b: int) -> Graph:
    """Adjacent centres 0 and 1 with ``a`` and ``b`` pendant leaves."""
    edges = [(0, 1)]
    edges += [(0, 2 + i) for i in range(a)]
    edges += [(1, 2 + a + j) for j in range(b)]
    return Graph.from_edges(a + b + 2, edges)


def w_graph(k: int, extra_leaf: bool = False) -> Graph:
    """Star with ``k`` subdivided rays, plus one plain ray when ``extra_leaf``.

    Centre 0, leaves ``1..k``, middles ``k+1..2k``; leaf ``i`` hangs off
    middle ``i+k``; the optional plain leaf is ``2k+1``.
    """
    if k < 1:
        raise HypothesisError("w_graph_needs_rays", str(k))
    edges = [(0, k + i) for i in range(1, k + 1)] + [(i, i + k) for i in range(1, k + 1)]
    n = 2 * k + 1
    if extra_leaf:
        edges.append((0, n))
        n += 1
    return Graph.from_edges(n, edges)


def box_product_graph(s: int) -> Graph:
    """``K_s □ K_2``: two copies of ``K_s`` joined by a perfect matching."""
    edges = [(i, j) for i in range(s) for j in range(i + 1, s)]
    edges += [(s + i, s + j) for i, j in list(edges)]
    edges += [(i, i + s) for i in range(s)]
    return Graph.from_edges(2 * s, edges)


def add_isolated(g: Graph, count: int = 1) -> Graph:
    return disjoint_union(g, Graph.empty(count))


# ---- Recognition ----------------------------------------------------------------


class FamilyKind(StrEnum):
    """Structured families recognized up to isomorphism."""

    C4 = "C4"
    W_PLUS_UNION_K1 = "WPlusUnionK1"
    SAB_UNION_K1 = "SabUnionK1"
    W_STAR_PLUS = "WStarPlus"
    W_STAR = "WStar"
    DOUBLE_STAR = "DoubleStar"
    PATH = "Path"
    BOX_PRODUCT = "BoxProduct"
    COMPLETE = "Complete"
    EMPTY = "Empty"
    NONE = "None"


@dataclass(frozen=True, slots=True)
class SpecialFamily:
    kind: FamilyKind
    params: tuple[int, ...] = ()


def _is_tree(g: Graph) -> bool:
    return g.n >= 1 and g.edge_count == g.n - 1 and g.is_connected()


def _double_star_params(g: Graph) -> tuple[int, int] | None:
    if g.n < 2 or not _is_tree(g):
        return None
    inner = [v for v in range(g.n) if g.degree(v) >= 2]
    if not inner:
        return (0, 0)
    if len(inner) == 1:
        return (g.n - 2, 0)
    if len(inner) == 2 and g.has_edge(*inner):
        a, b = (g.degree(v) - 1 for v in inner)
        return (max(a, b), min(a, b))
    return None


def _w_param(g: Graph, extra_leaf: bool) -> int | None:
    k, rem = divmod(g.n - (2 if extra_leaf else 1), 2)
    if rem or k < 2 or not _is_tree(g):
        return None
    if nx.is_isomorphic(g.to_networkx(), w_graph(k, extra_leaf).to_networkx()):
        return k
    return None


def _split_isolated(g: Graph) -> Graph | None:
    isolated = g.isolated_vertices()
    if len(isolated) != 1 or g.n < 3:
        return None
    return g.remove_vertex(isolated[0])


def recognize(g: Graph) -> SpecialFamily:
    """Identify ``g`` up to isomorphism, most specific family first."""
    if g.n == 4 and g.edge_count == 4 and all(g.degree(v) == 2 for v in range(4)):
        return SpecialFamily(FamilyKind.C4)

    if (rest := _split_isolated(g)) is not None:
        if (k := _w_param(rest, extra_leaf=True)) is not None:
            return SpecialFamily(FamilyKind.W_PLUS_UNION_K1, (k,))
        if (ab := _double_star_params(rest)) is not None:
            return SpecialFamily(FamilyKind.SAB_UNION_K1, ab)

    if (k := _w_param(g, extra_leaf=True)) is not None:
        return SpecialFamily(FamilyKind.W_STAR_PLUS, (k,))
    if (k := _w_param(g, extra_leaf=False)) is not None:
        return SpecialFamily(FamilyKind.W_STAR, (k,))
    if (ab := _double_star_params(g)) is not None:
        return SpecialFamily(FamilyKind.DOUBLE_STAR, ab)
    if _is_tree(g) and all(g.degree(v) <= 2 for v in range(g.n)):
        return SpecialFamily(FamilyKind.PATH, (g.n,))

    s, rem = divmod(g.n, 2)
    if (
        not rem
        and s >= 2
        and all(g.degree(v) == s for v in range(g.n))
        and nx.is_isomorphic(g.to_networkx(), box_product_graph(s).to_networkx())
    ):
        return SpecialFamily(FamilyKind.BOX_PRODUCT, (s,))

    if g.n >= 1 and g.edge_count == g.n * (g.n - 1) // 2:
        return SpecialFamily(FamilyKind.COMPLETE, (g.n,))
    if g.edge_count == 0:
        return SpecialFamily(FamilyKind.EMPTY, (g.n,))
    return SpecialFamily(FamilyKind.NONE)
