"""Balanced partitions of component sizes and join decompositions of dense graphs."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
import logging

from .errors import HypothesisError, LemmaContradictionError
from .graph import Graph, complement, components

_LOGGER = logging.getLogger(__name__)

MAX_BRUTE_FORCE_PARTS = 24


@dataclass(frozen=True, slots=True)
class BalancedPartition:
    """Two disjoint index sets over a size sequence (0-based positions)."""

    sizes: tuple[int, ...]
    a: frozenset[int]
    b: frozenset[int]

    @property
    def sum_a(self) -> int:
        return sum(self.sizes[i] for i in self.a)

    @property
    def sum_b(self) -> int:
        return sum(self.sizes[i] for i in self.b)

    @property
    def difference(self) -> int:
        return abs(self.sum_a - self.sum_b)

    def is_valid(self) -> bool:
        return not self.a & self.b and self.a | self.b == frozenset(range(len(self.sizes)))


def _check_sequence(t: Sequence[int]) -> tuple[int, ...]:
    seq = tuple(t)
    if not seq or any(x < 1 for x in seq):
        raise HypothesisError("invalid_size_sequence", str(seq))
    if any(seq[i] < seq[i + 1] for i in range(len(seq) - 1)):
        raise HypothesisError("sequence_not_non_increasing", str(seq))
    return seq


def satisfies_bound(t: Sequence[int]) -> bool:
    """Whether ``Σ(tᵢ − 1) ≤ n/2 − 1``."""
    return 2 * sum(x - 1 for x in t) <= sum(t) - 2


def _base_case(t: tuple[int, ...]) -> tuple[set[int], set[int]]:
    k = len(t)
    m = sum(1 for x in t if x == 2)
    if m % 2 == 0 or k % 2 == 0:
        return set(range(0, k, 2)), set(range(1, k, 2))
    return set(range(0, k - 2, 2)), {*range(1, k - 1, 2), k - 1}


def _balance(t: tuple[int, ...]) -> tuple[set[int], set[int]]:
    k = len(t)
    x = sum(1 for v in t if v == 1)
    y = sum(1 for v in t if v > 2)
    if x < y + 2:
        raise LemmaContradictionError("too_few_singletons", {"sequence": t, "x": x, "y": y})
    if t[0] <= 2:
        return _base_case(t)

    reduced = tuple(v - 1 if i < y else v for i, v in enumerate(t[: k - y]))
    a, b = _balance(reduced)
    sum_a = sum(t[i] for i in a)
    sum_b = sum(t[i] for i in b)
    for i in range(k - y, k):
        if sum_a <= sum_b:
            a.add(i)
            sum_a += 1
        else:
            b.add(i)
            sum_b += 1
    _LOGGER.debug("Balanced %s as %d|%d", t, sum_a, sum_b)
    return a, b


def balance_partition(t: Sequence[int]) -> BalancedPartition:
    """Split a non-increasing size sequence into two halves differing by at most one.

    Recurses on the largest size: every part larger than two loses one unit and
    the same number of trailing singletons is set aside, then handed out one at
    a time to the lighter side.
    """
    seq = _check_sequence(t)
    if not satisfies_bound(seq):
        raise HypothesisError("size_bound_violated", str(seq))
    a, b = _balance(seq)
    result = BalancedPartition(seq, frozenset(a), frozenset(b))
    if not result.is_valid() or result.difference > 1:
        raise LemmaContradictionError("unbalanced_partition", {"sequence": seq})
    return result


def brute_force_partition(t: Sequence[int]) -> BalancedPartition:
    """Optimal split by exhaustive subset-sum reachability."""
    seq = tuple(t)
    if len(seq) > MAX_BRUTE_FORCE_PARTS:
        raise HypothesisError("too_many_parts", str(len(seq)))
    if any(x < 1 for x in seq):
        raise HypothesisError("invalid_size_sequence", str(seq))
    reach: dict[int, int] = {0: 0}
    for i, size in enumerate(seq):
        for total, mask in list(reach.items()):
            reach.setdefault(total + size, mask | (1 << i))
    n = sum(seq)
    best = min(reach, key=lambda s: (abs(n - 2 * s), -s))
    a = frozenset(i for i in range(len(seq)) if reach[best] >> i & 1)
    return BalancedPartition(seq, a, frozenset(range(len(seq))) - a)


# ---- Join decomposition ---------------------------------------------------------


class JoinRoute(StrEnum):
    SAME_ORDER = "SameOrder"
    ORDER_DIFF_2 = "OrderDiff2"
    ODD_VIA_JDUP = "OddViaJdup"


@dataclass(frozen=True, slots=True)
class JoinDecomposition:
    """``g`` as the join of ``g[parts[0]]`` and ``g[parts[1]]``.

    For odd order the parts are those of ``g − removed`` relabelled back onto
    ``g``, with ``removed`` placed beside its complement-isolated partner
    ``twin``; ``inner`` is the even decomposition it came from.
    """

    parts: tuple[frozenset[int], frozenset[int]]
    route: JoinRoute
    partition: BalancedPartition
    removed: int | None = None
    twin: int | None = None
    inner: JoinDecomposition | None = None

    def is_join_of_parts(self, g: Graph) -> bool:
        left, right = self.parts
        return (
            not left & right
            and left | right == frozenset(range(g.n))
            and all(g.has_edge(u, v) for u in left for v in right)
        )


def _even_decomposition(g: Graph) -> JoinDecomposition:
    comps = components(complement(g))
    partition = balance_partition([len(c) for c in comps])
    if partition.difference:
        raise LemmaContradictionError("even_split_unequal", {"graph": str(g)})
    a, b = set(partition.a), set(partition.b)
    k = len(comps)
    route = JoinRoute.SAME_ORDER
    if {k - 2, k - 1} <= a or {k - 2, k - 1} <= b:
        src, dst = (a, b) if k - 1 in a else (b, a)
        src.discard(k - 1)
        dst.add(k - 1)
        route = JoinRoute.ORDER_DIFF_2
    parts = (
        frozenset().union(*(comps[i] for i in sorted(a))),
        frozenset().union(*(comps[i] for i in sorted(b))),
    )
    for part in parts:
        if not g.induced(part).is_connected():
            raise LemmaContradictionError("join_part_disconnected", {"graph": str(g)})
    return JoinDecomposition(parts, route, partition)


def join_decomposition(g: Graph) -> JoinDecomposition:
    """Write a graph with at most ``⌊n/2⌋ − 1`` complement edges as a join."""
    n = g.n
    if n < 3 or complement(g).edge_count > n // 2 - 1:
        raise HypothesisError("join_bound_violated", f"n={n}")
    if n % 2 == 0:
        result = _even_decomposition(g)
    else:
        isolated = complement(g).isolated_vertices()
        if len(isolated) < 3:
            raise LemmaContradictionError("too_few_isolated", {"graph": str(g)})
        w, z = isolated[-1], isolated[-2]
        inner = _even_decomposition(g.remove_vertex(w))
        back = [v if v < w else v + 1 for v in range(n - 1)]
        lifted = [frozenset(back[v] for v in part) for part in inner.parts]
        host = 0 if z in lifted[0] else 1
        lifted[host] |= {w}
        result = JoinDecomposition(
            (lifted[0], lifted[1]), JoinRoute.ODD_VIA_JDUP, inner.partition, w, z, inner
        )
    if not result.is_join_of_parts(g):
        raise LemmaContradictionError("not_a_join", {"graph": str(g)})
    _LOGGER.debug(
        "Join decomposition of %s: %d|%d via %s",
        g, len(result.parts[0]), len(result.parts[1]), result.route,
    )
    return result
