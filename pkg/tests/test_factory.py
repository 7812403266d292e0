from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from q2cert.const import Construction
from q2cert.errors import HypothesisError
from q2cert.factory import (
    box_k2_realization,
    cycle_complement_rep,
    faithful_vectors,
    h7_graph,
    jdup_lift,
    k3bar_join,
    m7_matrix,
    ortho_complete,
    pattern_of,
    t_construction,
    tricyc_realization,
    w_hat,
    w_hat_blocks,
)
from q2cert.graph import Graph, box_product_graph, complement, cycle_graph, jdup, join, w_graph
from q2cert.linalg import exact_identity, exact_matmul, is_totally_nonzero
from q2cert.spectral import distinct_eigenvalues, pattern_check, rational_eigenvalues

# ---- Complete graphs and prisms ----


def test_ortho_complete_small_cases() -> None:
    assert ortho_complete(2).exact == ((0, 1), (1, 0))
    r3 = ortho_complete(3)
    assert r3.exact is not None
    assert r3.exact[0][0] == Fraction(-1, 3)
    assert r3.exact[0][1] == Fraction(2, 3)
    assert exact_matmul(r3.exact, r3.exact) == exact_identity(3)


def test_ortho_complete_squares_to_identity_exactly() -> None:
    r = ortho_complete(10)
    assert r.exact is not None
    assert exact_matmul(r.exact, r.exact) == exact_identity(10)
    assert r.construction is Construction.ORTHO_COMPLETE
    with pytest.raises(HypothesisError):
        ortho_complete(1)


@pytest.mark.parametrize("s", [2, 3, 4])
def test_box_k2_realization(s: int) -> None:
    r = box_k2_realization(s)
    assert r.pattern == box_product_graph(s)
    assert r.exact is not None
    square = exact_matmul(r.exact, r.exact)
    assert square == tuple(tuple(2 * x for x in row) for row in exact_identity(2 * s))
    assert r.spectrum is not None
    assert r.spectrum.distinct_count == 2
    assert r.ssp is not None
    assert r.ssp.has_ssp


def test_box_k2_of_order_two_is_a_four_cycle() -> None:
    assert box_k2_realization(2).pattern.edge_count == 4
    assert all(box_k2_realization(2).pattern.degree(v) == 2 for v in range(4))


# ---- M7 ----


def test_m7_entries_and_spectrum() -> None:
    r = m7_matrix()
    assert r.exact is not None
    assert r.exact[0][0] == 3
    assert r.exact[0][1] == 1
    assert r.exact[4][4] == 2
    assert r.exact[4][6] == -1
    assert r.pattern == h7_graph()
    assert r.spectrum is not None
    assert r.spectrum.distinct_count == 2
    assert r.ssp is not None
    assert r.ssp.has_ssp
    assert r.ssp.kernel_dimension == 0


def test_h7_is_the_support_of_m7() -> None:
    h7 = h7_graph()
    assert h7.n == 7
    assert pattern_check(m7_matrix().matrix, h7).ok


# ---- T construction and w_hat ----


def test_t_construction_k3() -> None:
    tc = t_construction(3)
    assert tc.t[0] == (0, 1, 4, 9)
    assert tc.u == (1, -3, 3, -1)


def test_t_construction_k5_tail() -> None:
    assert t_construction(5).u[3:] == (-1, -1, -1)


@pytest.mark.parametrize("k", range(3, 13))
def test_t_construction_identities(k: int) -> None:
    tc = t_construction(k)
    size = k + 1
    assert all(tc.t[i][j] == (i - j) ** 2 for i in range(size) for j in range(size))
    assert all(sum(tc.t[i][j] * tc.u[j] for j in range(size)) == 0 for i in range(size))
    b2 = exact_matmul(tc.b, tc.b)
    assert all(x > 0 for row in b2 for x in row)
    assert max(sum(abs(x) for x in row) for row in tc.b) < 1
    assert all(x != 0 for x in tc.u)


def test_t_construction_rejects_small_k() -> None:
    with pytest.raises(HypothesisError):
        t_construction(2)


@pytest.mark.parametrize("k", range(3, 9))
def test_w_hat(k: int) -> None:
    r = w_hat(k)
    assert np.linalg.norm(r.matrix @ r.matrix - np.eye(r.n)) < 1e-10
    assert r.pattern == complement(w_graph(k + 1))
    assert r.ssp is not None
    assert r.ssp.has_ssp
    assert r.ssp.singular_ratio is not None
    assert r.ssp.singular_ratio > 1e-8


def test_w_hat_block_identity() -> None:
    tc = t_construction(3)
    _, c1, c2 = w_hat_blocks(3, 0.5)
    assert c1 == pytest.approx(-c2 - np.outer(tc.v, tc.v), abs=1e-10)


def test_w_hat_rejects_zero_alpha() -> None:
    with pytest.raises(HypothesisError):
        w_hat(3, alpha=0)


# ---- Cycle complements and three-vertex joins ----


def test_seed_rows_gram_spectrum() -> None:
    vs = faithful_vectors(5)
    p = tuple(tuple(Fraction(x) for x in v) for v in vs[:3])
    pt = tuple(zip(*p, strict=True))
    assert vs[0][0] * vs[1][0] + vs[0][1] * vs[1][1] + vs[0][2] * vs[1][2] == 0
    assert rational_eigenvalues(exact_matmul(pt, p)) == (2, 7, 14)


@pytest.mark.parametrize("count", [5, 7, 9, 11])
def test_faithful_vectors_orthogonality_graph_is_a_cycle(count: int) -> None:
    vs = faithful_vectors(count)
    dot = [[sum(a * b for a, b in zip(u, w, strict=True)) for w in vs] for u in vs]
    ortho = pattern_of(np.array(dot, dtype=float) == 0)
    assert ortho == cycle_graph(count)


def test_cycle_complement_rep_base_case() -> None:
    rep = cycle_complement_rep(6)
    assert rep.rows == ((1, 0, 0), (0, 2, 0), (0, 0, 3))
    assert rep.realization.pattern == Graph.empty(3)


@pytest.mark.parametrize("n", [6, 8, 10, 12, 14])
def test_cycle_complement_rep(n: int) -> None:
    rep = cycle_complement_rep(n)
    assert rep.realization.pattern == complement(cycle_graph(n - 3))
    assert pattern_check(rep.realization.exact, rep.realization.pattern).ok
    lo, mid, hi = rep.gram_eigenvalues
    assert lo < mid < hi
    if n > 6:
        q = np.array(faithful_vectors(n - 3)[3:], dtype=float)
        rho_hat = float(rep.epsilon**2) * float(np.linalg.eigvalsh(q.T @ q)[-1])
        assert rep.rho_hat == pytest.approx(rho_hat)
        assert 0 < rho_hat <= 1.25
        assert min(mid - lo, hi - mid) > 2 * rho_hat


def test_cycle_complement_rep_rejects_odd() -> None:
    with pytest.raises(HypothesisError):
        cycle_complement_rep(7)


@pytest.mark.parametrize("n", [6, 8, pytest.param(10, marks=pytest.mark.slow), pytest.param(12, marks=pytest.mark.slow)])
def test_tricyc_realization(n: int) -> None:
    r = tricyc_realization(n)
    assert r.pattern == join(complement(cycle_graph(n - 3)), Graph.complete(3))
    assert r.spectrum is not None
    assert r.spectrum.distinct_count == 2
    assert r.ssp is not None
    assert r.ssp.has_ssp
    (zero, low_mult), (alpha, high_mult) = r.spectrum.clusters
    assert zero == pytest.approx(0.0, abs=1e-9)
    assert (low_mult, high_mult) == (n - 3, 3)
    assert alpha > 0
    assert r.parameters["gram_defect"] <= 1e-10
    assert alpha == pytest.approx(r.parameters["alpha"], rel=1e-9)
    m = np.asarray(r.matrix, dtype=float)
    assert is_totally_nonzero(m[: n - 3, n - 3 :], 1e-6)
    assert not is_totally_nonzero(m[: n - 3, : n - 3], 1e-6)


def test_k3bar_join_from_tricyc() -> None:
    gamma = tricyc_realization(8)
    r = k3bar_join(gamma)
    assert r.n == 11
    assert r.pattern == join(gamma.pattern, Graph.empty(3))
    assert r.spectrum is not None
    assert r.spectrum.distinct_count == 2


def test_k3bar_join_needs_rank_three_psd() -> None:
    with pytest.raises(HypothesisError):
        k3bar_join(ortho_complete(4))


# ---- Joined duplication ----


def test_jdup_lift_of_k2_is_exact_k3() -> None:
    r = jdup_lift(ortho_complete(2), 0)
    assert r.pattern == Graph.complete(3)
    assert r.is_exact
    assert r.spectrum is not None
    assert r.spectrum.distinct_count == 2


def test_repeated_jdup_lift_builds_complete_graphs() -> None:
    r = ortho_complete(2)
    for t in range(1, 5):
        r = jdup_lift(r, t % r.n)
        assert r.pattern == Graph.complete(2 + t)
        assert distinct_eigenvalues(r.best()).distinct_count == 2


def test_jdup_lift_of_m7() -> None:
    r = jdup_lift(m7_matrix(), 0, require_ssp=False)
    assert r.n == 8
    assert r.pattern == jdup(h7_graph(), 0)
    assert distinct_eigenvalues(r.best()).distinct_count == 2


def test_jdup_lift_rejects_bad_vertex() -> None:
    with pytest.raises(HypothesisError):
        jdup_lift(ortho_complete(3), 5)
