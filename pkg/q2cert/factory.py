"""Explicit matrix constructions with two distinct eigenvalues.

Each public constructor returns a :class:`Realization` that has already passed
``verify_realization``: the matrix lies in the pattern class of its graph, has
the advertised number of distinct eigenvalues and, unless stated otherwise,
the Strong Spectral Property.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, replace
from fractions import Fraction
import itertools
import logging

import numpy as np
from scipy import linalg as sla

from .config import Q2CertConfig
from .const import (
    ALPHA_DENOMINATOR,
    CYCLE_SEED_ROWS,
    M7_ENTRIES,
    PYTHAGOREAN_ROTATIONS,
    Construction,
)
from .errors import ConstructionError, HypothesisError
from .graph import (
    Graph,
    box_product_graph,
    complement,
    cycle_graph,
    jdup,
    join,
    w_graph,
)
from .linalg import (
    ExactMatrix,
    FloatMatrix,
    as_exact,
    exact_blocks,
    exact_identity,
    exact_matmul,
    exact_scale,
    is_totally_nonzero,
    random_orthogonal,
    symmetric_sqrt,
    to_float,
)
from .optimize import supergraph_lift
from .realization import Realization, verify_realization
from .spectral import distinct_eigenvalues, rational_eigenvalues, ssp_check

_LOGGER = logging.getLogger(__name__)

MAX_ORTHOGONAL_RETRIES = 200
MAX_SAMPLE_CANDIDATES = 1000

Vec3 = tuple[int, int, int]


def _config(config: Q2CertConfig | None) -> Q2CertConfig:
    return config if config is not None else Q2CertConfig()


def pattern_of(a: ExactMatrix | FloatMatrix, floor: float = 0.0) -> Graph:
    """Graph of the off-diagonal entries whose magnitude exceeds ``floor``."""
    n = len(a)
    return Graph.from_edges(
        n, ((i, j) for i in range(n) for j in range(i + 1, n) if abs(a[i][j]) > floor)
    )


# ---- Complete graphs and K_s □ K_2 ----------------------------------------------


def _ortho_complete_exact(s: int) -> ExactMatrix:
    off = Fraction(2, s)
    return tuple(tuple(off - 1 if i == j else off for j in range(s)) for i in range(s))


def ortho_complete(s: int, config: Q2CertConfig | None = None) -> Realization:
    """``(2/s)·J − I``: a symmetric orthogonal matrix in the class of ``K_s``."""
    if s < 2:
        raise HypothesisError("complete_graph_too_small", str(s))
    r = Realization.from_exact(
        _ortho_complete_exact(s), Graph.complete(s), Construction.ORTHO_COMPLETE, {"s": s}
    )
    return verify_realization(r, _config(config))


def box_k2_realization(s: int, config: Q2CertConfig | None = None) -> Realization:
    """``[[B, I], [I, −B]]`` with ``B = ortho_complete(s)``; its square is ``2I``."""
    if s < 2:
        raise HypothesisError("box_product_too_small", str(s))
    b = _ortho_complete_exact(s)
    eye = exact_identity(s)
    exact = exact_blocks([[b, eye], [eye, exact_scale(b, Fraction(-1))]])
    r = Realization.from_exact(exact, box_product_graph(s), Construction.BOX_K2, {"s": s})
    return verify_realization(r, _config(config))


# ---- M7 -------------------------------------------------------------------------


def h7_graph() -> Graph:
    """The 7-vertex graph carried by the off-diagonal support of ``M7``."""
    return pattern_of(as_exact(M7_ENTRIES))


def m7_matrix(config: Q2CertConfig | None = None) -> Realization:
    r = Realization.from_exact(as_exact(M7_ENTRIES), h7_graph(), Construction.M7)
    return verify_realization(r, _config(config))


# ---- The T-matrix construction and the complement of W_{2k+3} -------------------


@dataclass(frozen=True, slots=True)
class TConstruction:
    """``B = β·T`` with ``T_ij = (i−j)²`` and a totally nonzero null vector."""

    t: ExactMatrix
    beta: Fraction
    b: ExactMatrix
    u: tuple[Fraction, ...]
    v: FloatMatrix


def t_construction(k: int) -> TConstruction:
    if k < 3:
        raise HypothesisError("t_construction_needs_k_ge_3", str(k))
    size = k + 1
    t = tuple(tuple(Fraction((i - j) ** 2) for j in range(size)) for i in range(size))

    u = [Fraction(0)] * size
    for i in range(4, k + 2):  # 1-based row index of the dependent rows
        u[0] += Fraction((i - 2) * (i - 3), 2)
        u[1] -= (i - 1) * (i - 3)
        u[2] += Fraction((i - 1) * (i - 2), 2)
        u[i - 1] -= 1

    row_sum = max(sum(row) for row in t)
    beta = 1 / (2 * row_sum)
    v = np.array([float(x) for x in u])
    return TConstruction(t, beta, exact_scale(t, beta), tuple(u), v / np.linalg.norm(v))


def alpha_candidates() -> Iterator[Fraction]:
    """``±j/17`` by decreasing magnitude, positive first."""
    for j in range(ALPHA_DENOMINATOR - 1, 0, -1):
        yield Fraction(j, ALPHA_DENOMINATOR)
        yield Fraction(-j, ALPHA_DENOMINATOR)


def w_hat_blocks(k: int, alpha: float) -> tuple[FloatMatrix, FloatMatrix, FloatMatrix]:
    """Return ``(M, C1, C2)`` for the orthogonal matrix on ``2k+3`` vertices."""
    tc = t_construction(k)
    b = to_float(tc.b)
    v = tc.v
    size = k + 1
    eye = np.eye(size)
    b2 = b @ b
    c2 = -symmetric_sqrt(eye - alpha**2 * b2)
    c1 = symmetric_sqrt(eye - alpha**2 * b2 - np.outer(v, v), allow_singular=True)

    n = 2 * size + 1
    m = np.zeros((n, n))
    m[0, 1 : size + 1] = v
    m[1 : size + 1, 0] = v
    m[1 : size + 1, 1 : size + 1] = c1
    m[1 : size + 1, size + 1 :] = alpha * b
    m[size + 1 :, 1 : size + 1] = alpha * b
    m[size + 1 :, size + 1 :] = c2
    return m, c1, c2


def w_hat(
    k: int, alpha: float | Fraction | None = None, config: Q2CertConfig | None = None
) -> Realization:
    """Symmetric orthogonal realization of the complement of ``W(k+1, 0)``.

    Vertex 0 is the centre of ``W(k+1, 0)``, ``1..k+1`` its leaves and
    ``k+2..2k+2`` its middles. With ``alpha`` omitted the candidates
    ``±j/17`` are tried in order until the pattern is exact.
    """
    cfg = _config(config)
    if k < 3:
        raise HypothesisError("w_hat_needs_k_ge_3", str(k))
    pattern = complement(w_graph(k + 1))
    candidates = [Fraction(alpha)] if alpha is not None else list(alpha_candidates())
    for a in candidates:
        if a == 0 or abs(a) > 1:
            raise HypothesisError("alpha_out_of_range", str(a))
        m, _, _ = w_hat_blocks(k, float(a))
        r = Realization(m, pattern, Construction.WHAT, {"k": k, "alpha": a})
        try:
            return verify_realization(r, cfg)
        except ConstructionError as err:
            if err.code != "pattern_violation":
                raise
            _LOGGER.debug("alpha=%s breaks the pattern for k=%d: %s", a, k, err.diagnostics)
            if alpha is not None:
                raise HypothesisError("alpha_breaks_pattern", str(a)) from err
    raise ConstructionError("alpha_exhausted", {"k": k})


# ---- Orthogonal representations of cycle complements ----------------------------


def _cross(a: Vec3, b: Vec3) -> Vec3:
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a: Vec3, b: Vec3) -> int:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _perp_basis(v: Vec3) -> tuple[Vec3, Vec3]:
    for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        a = _cross(v, e)
        if any(a):
            return a, _cross(v, a)
    raise HypothesisError("zero_vector")


def _integer_points(v: Vec3) -> Iterator[Vec3]:
    """Nonzero integer combinations of a basis of ``v⊥`` by increasing max-norm."""
    a, b = _perp_basis(v)
    for radius in itertools.count(1):
        for s in range(-radius, radius + 1):
            for t in range(-radius, radius + 1):
                if max(abs(s), abs(t)) == radius:
                    yield (s * a[0] + t * b[0], s * a[1] + t * b[1], s * a[2] + t * b[2])


def _next_vector(vs: list[Vec3]) -> Vec3:
    last = vs[-1]
    for count, w in enumerate(_integer_points(last)):
        if count >= MAX_SAMPLE_CANDIDATES:
            break
        if all(_dot(w, x) != 0 for x in vs[:-1]) and all(
            _dot(_cross(vs[0], x), w) != 0 for x in vs[1:]
        ):
            return w
        _LOGGER.debug("Rejected sample %s", w)
    raise ConstructionError("sampling_exhausted", {"vectors": len(vs)})


@dataclass(frozen=True, slots=True)
class CycleRep:
    """Rows of ``M`` and the realization ``M Mᵀ`` of the cycle complement."""

    rows: ExactMatrix
    epsilon: Fraction
    rho_hat: float
    gram_eigenvalues: tuple[float, float, float]
    realization: Realization


def faithful_vectors(count: int) -> list[Vec3]:
    """``count`` integer vectors whose orthogonality graph is the cycle ``C_count``."""
    if count < 5:
        raise HypothesisError("cycle_too_short", str(count))
    vs: list[Vec3] = list(CYCLE_SEED_ROWS)
    while len(vs) < count - 1:
        vs.append(_next_vector(vs))
    vs.append(_cross(vs[0], vs[-1]))
    return vs


def cycle_complement_rep(n: int, config: Q2CertConfig | None = None) -> CycleRep:
    """``(n−3)×3`` matrix ``M`` with ``M Mᵀ`` in the class of the complement of ``C_{n−3}``."""
    cfg = _config(config)
    if n < 6 or n % 2:
        raise HypothesisError("cycle_rep_needs_even_n_ge_6", str(n))
    if n == 6:
        rows = as_exact([(1, 0, 0), (0, 2, 0), (0, 0, 3)])
        epsilon = Fraction(1)
        rho_hat = 0.0
    else:
        vs = faithful_vectors(n - 3)
        q = vs[3:]
        frob = sum(_dot(x, x) for x in q)
        # ε² ρ(QᵀQ) ≤ ε² ‖Q‖_F² ≤ 5/4, below half the smallest gap of {14, 7, 2}
        m = 1
        while 5 * m * m < 4 * frob:
            m += 1
        epsilon = Fraction(1, m)
        if not epsilon**2 * frob < Fraction(5, 2):
            raise ConstructionError("weyl_margin_violated", {"epsilon": str(epsilon)})
        rows = tuple(tuple(Fraction(x) for x in v) for v in vs[:3]) + tuple(
            tuple(epsilon * x for x in v) for v in q
        )
        # Weyl radius of the ε²QᵀQ perturbation of the seed Gram matrix
        qf = np.array(q, dtype=float)
        rho_hat = float(epsilon**2) * float(sla.eigh(qf.T @ qf, eigvals_only=True)[-1])

    transpose = tuple(zip(*rows, strict=True))
    gram = exact_matmul(rows, transpose)
    small = to_float(exact_matmul(transpose, rows))
    eig = sla.eigh(small, eigvals_only=True)
    margin = max(2 * rho_hat, cfg.cluster_tol * max(1.0, float(eig[-1])))
    if np.min(np.diff(eig)) <= margin:
        raise ConstructionError(
            "gram_eigenvalues_not_distinct", {"eigenvalues": eig.tolist(), "rho_hat": rho_hat}
        )

    r = Realization.from_exact(
        gram,
        complement(cycle_graph(n - 3)),
        Construction.CYCLE_REP,
        {"n": n, "epsilon": epsilon, "rho_hat": rho_hat},
    )
    r = verify_realization(r, cfg, distinct=None, require_ssp=False)
    return CycleRep(rows, epsilon, rho_hat, (float(eig[0]), float(eig[1]), float(eig[2])), r)


# ---- Joins with three vertices --------------------------------------------------


def tricyc_realization(
    n: int, config: Q2CertConfig | None = None, seed: int | None = None
) -> Realization:
    """Realization of the complement of ``C_{n−3}`` joined with ``K_3``.

    The cycle vertices come first, followed by the three joined vertices.
    """
    cfg = _config(config)
    rep = cycle_complement_rep(n, cfg)
    m = to_float(rep.rows)
    gram = m.T @ m
    alpha = float(sla.eigh(gram, eigvals_only=True)[-1]) + 1.0
    m1 = symmetric_sqrt(alpha * np.eye(3) - gram)
    cyc = complement(cycle_graph(n - 3))
    rng = np.random.default_rng([cfg.seed if seed is None else seed, n])

    for attempt in range(MAX_ORTHOGONAL_RETRIES):
        rot = random_orthogonal(rng, 3)
        cross = m @ m1.T @ rot.T
        if not is_totally_nonzero(cross, cfg.nonzero_floor):
            _LOGGER.debug("Orthogonal sample %d leaves a zero in the cross block", attempt)
            continue
        c = rot @ m1 @ m1.T @ rot.T
        off = np.abs(c[np.triu_indices(3, 1)])
        if np.any((off > cfg.zero_ceiling) & (off <= cfg.nonzero_floor)):
            continue
        b_prime = np.vstack([m, rot @ m1])
        defect = float(np.max(np.abs(b_prime.T @ b_prime - alpha * np.eye(3))))
        if defect > cfg.tol_residual:
            raise ConstructionError("column_gram_not_scalar", {"n": n, "defect": defect})
        full = b_prime @ b_prime.T
        full = (full + full.T) / 2
        full[: n - 3, : n - 3] = rep.realization.matrix
        h = pattern_of(c, cfg.nonzero_floor)
        r = Realization(
            full,
            join(cyc, h),
            Construction.TRI_CYC,
            {
                "n": n,
                "alpha": alpha,
                "attempt": attempt,
                "gram_defect": defect,
                "seed": cfg.seed if seed is None else seed,
            },
        )
        r = verify_realization(r, cfg)
        if h.edge_count < 3:
            _LOGGER.info("Three-vertex block has %d edges; lifting to K3", h.edge_count)
            lifted = supergraph_lift(r, join(cyc, Graph.complete(3)), cfg)
            r = replace(lifted, parameters={**r.parameters, **lifted.parameters})
        return r
    raise ConstructionError("orthogonal_sampling_exhausted", {"n": n})


def k3bar_join(
    gamma: Realization, config: Q2CertConfig | None = None, seed: int | None = None
) -> Realization:
    """Join a rank-3 positive semidefinite two-eigenvalue realization with three independent vertices."""
    cfg = _config(config)
    spectrum = gamma.spectrum or distinct_eigenvalues(gamma.matrix, cluster_tol=cfg.cluster_tol)
    if spectrum.distinct_count != 2:
        raise HypothesisError("gamma_needs_two_eigenvalues")
    (lo, m_lo), (hi, m_hi) = spectrum.clusters
    scale = max(1.0, abs(hi))
    if abs(lo) > cfg.cluster_tol * scale or hi <= 0 or m_hi != 3:
        raise HypothesisError("gamma_not_rank3_psd", f"spectrum {spectrum.clusters}")
    ssp = gamma.ssp or ssp_check(gamma.matrix, gamma.pattern, tol_rank=cfg.tol_rank)
    if not ssp.has_ssp:
        raise HypothesisError("gamma_lacks_ssp")

    w, vecs = sla.eigh(gamma.matrix)
    c = vecs[:, -3:] * np.sqrt(w[-3:])
    if not np.allclose(c.T @ c, hi * np.eye(3), atol=cfg.tol_residual * 1e2 * scale):
        raise HypothesisError("gamma_factor_not_scalar")

    rng = np.random.default_rng([cfg.seed if seed is None else seed, gamma.n])
    for attempt in range(MAX_ORTHOGONAL_RETRIES):
        q = random_orthogonal(rng, 3)
        cross = c @ q.T
        if not is_totally_nonzero(cross, cfg.nonzero_floor):
            continue
        full = np.block([[gamma.matrix, cross], [cross.T, np.eye(3)]])
        r = Realization(
            (full + full.T) / 2,
            join(gamma.pattern, Graph.empty(3)),
            Construction.K3BAR_JOIN,
            {"attempt": attempt, "scalar": hi, "source": str(gamma.construction)},
        )
        return verify_realization(r, cfg)
    raise ConstructionError("orthogonal_sampling_exhausted", {"n": gamma.n})


# ---- Joined duplication ---------------------------------------------------------


def _rotate_in(
    a: ExactMatrix | FloatMatrix, v: int, lam: Fraction | float, c: Fraction, s: Fraction
) -> list[list]:
    n = len(a)
    out = [[a[i][j] for j in range(n)] + [0] for i in range(n)]
    out.append([0] * (n + 1))
    for i in range(n):
        if i == v:
            continue
        out[i][v] = out[v][i] = c * a[i][v]
        out[i][n] = out[n][i] = s * a[i][v]
    out[v][v] = c * c * a[v][v] + s * s * lam
    out[n][n] = s * s * a[v][v] + c * c * lam
    out[v][n] = out[n][v] = c * s * (a[v][v] - lam)
    return out


def jdup_lift(
    a: Realization,
    v: int,
    config: Q2CertConfig | None = None,
    *,
    require_ssp: bool = True,
) -> Realization:
    """Realize ``jdup(pattern(a), v)`` with the same two eigenvalues.

    ``diag(A, λ)`` is rotated in the plane of ``v`` and the new vertex, with
    ``λ`` an eigenvalue of ``A`` different from ``A_vv``. Rational rotations
    keep exact inputs exact.
    """
    cfg = _config(config)
    if not 0 <= v < a.n:
        raise HypothesisError("vertex_out_of_range", str(v))
    spectrum = a.spectrum or distinct_eigenvalues(a.best(), cluster_tol=cfg.cluster_tol)
    if spectrum.distinct_count != 2:
        raise HypothesisError("jdup_lift_needs_two_eigenvalues", str(spectrum.distinct_count))

    exact_values = rational_eigenvalues(a.exact) if a.exact is not None else None
    base: ExactMatrix | FloatMatrix = a.exact if exact_values is not None else a.matrix
    values: tuple[Fraction | float, ...] = exact_values or spectrum.values
    diag = base[v][v]
    ordered = sorted(values, key=lambda lam: -abs(float(lam) - float(diag)))
    target = jdup(a.pattern, v)
    last: ConstructionError | None = None

    for lam in ordered:
        if abs(float(lam) - float(diag)) <= cfg.pattern_floor:
            continue
        for p, q, h in PYTHAGOREAN_ROTATIONS:
            c, s = Fraction(p, h), Fraction(q, h)
            rows = _rotate_in(base, v, lam, c, s)
            params = {"vertex": v, "eigenvalue": lam, "cos": c, "sin": s, "source": str(a.construction)}
            if exact_values is not None:
                r = Realization.from_exact(as_exact(rows), target, Construction.JDUP, params)
            else:
                m = np.array([[float(x) for x in row] for row in rows])
                r = Realization(m, target, Construction.JDUP, params)
            try:
                return verify_realization(r, cfg, require_ssp=require_ssp)
            except ConstructionError as err:
                _LOGGER.debug("jdup rotation (%s, %s) rejected: %s", c, s, err.code)
                last = err
    if last is not None and last.code == "ssp_failure":
        _LOGGER.warning("jdup lift of vertex %d lost the SSP for every rotation", v)
    raise ConstructionError(
        "jdup_lift_failed",
        {"vertex": v, "last": None if last is None else last.code},
    )
