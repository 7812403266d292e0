"""Pattern membership, distinct-eigenvalue counting and the Strong Spectral Property.

Every check runs in exact rational arithmetic when handed an exact matrix and
in floating point otherwise. Floating verdicts that fall between the rank
tolerance and ten times that tolerance are reported as inconclusive rather
than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
import logging

import numpy as np
from scipy import linalg as sla
from sympy import Poly, Symbol
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .const import (
    AMBIGUITY_FACTOR,
    CLUSTER_TOL,
    PATTERN_FLOOR,
    TOL_RANK,
    ZERO_CEILING,
    ArithmeticMode,
)
from .errors import HypothesisError
from .graph import Graph
from .linalg import (
    ExactMatrix,
    FloatMatrix,
    MatrixLike,
    is_exact,
    is_symmetric,
    to_domain_matrix,
    to_float,
)

_LOGGER = logging.getLogger(__name__)


class SspVerdict(StrEnum):
    SSP = "SSP"
    NOT_SSP = "not-SSP"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, slots=True)
class PatternReport:
    ok: bool
    violation: tuple[int, int] | None = None
    reason: str | None = None


@dataclass(frozen=True, slots=True)
class SpectrumSummary:
    """Eigenvalues of a symmetric matrix grouped into distinct values."""

    eigenvalues: tuple[float, ...]
    clusters: tuple[tuple[float, int], ...]
    mode: ArithmeticMode
    ambiguous: bool = False
    factors: tuple[tuple[str, int], ...] = ()

    @property
    def distinct_count(self) -> int:
        return len(self.clusters)

    @property
    def multiplicity_bipartition(self) -> tuple[int, int] | None:
        if self.distinct_count != 2:
            return None
        return (self.clusters[0][1], self.clusters[1][1])

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(value for value, _ in self.clusters)


@dataclass(frozen=True, slots=True)
class SspReport:
    mode: ArithmeticMode
    constraint_rows: int
    constraint_cols: int
    kernel_dimension: int
    verdict: SspVerdict
    smallest_singular_value: float | None = None
    singular_ratio: float | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def has_ssp(self) -> bool:
        return self.verdict is SspVerdict.SSP


# ---- Pattern --------------------------------------------------------------------


def _check_square(a: MatrixLike, g: Graph) -> int:
    n = len(a)
    if any(len(row) != n for row in a) or n != g.n:
        raise HypothesisError("dimension_mismatch", f"{n} vs {g.n}")
    return n


def pattern_check(
    a: MatrixLike,
    g: Graph,
    *,
    floor: float = PATTERN_FLOOR,
    ceiling: float = ZERO_CEILING,
) -> PatternReport:
    """Test whether the off-diagonal support of ``a`` is exactly ``E(g)``.

    The first violation in row-major order over the upper triangle is
    reported with 0-based indices.
    """
    n = _check_square(a, g)
    if is_exact(a):
        exact: ExactMatrix = a  # type: ignore[assignment]
        for i in range(n):
            for j in range(i + 1, n):
                if exact[i][j] != exact[j][i]:
                    raise HypothesisError("not_symmetric", f"({i}, {j})")
        for i, j in ((i, j) for i in range(n) for j in range(i + 1, n)):
            if (exact[i][j] != 0) != g.has_edge(i, j):
                reason = "missing_edge_entry" if g.has_edge(i, j) else "nonzero_non_edge"
                return PatternReport(False, (i, j), reason)
        return PatternReport(True)

    m = to_float(a)
    if not is_symmetric(m):
        raise HypothesisError("not_symmetric")
    for i in range(n):
        for j in range(i + 1, n):
            x = abs(m[i, j])
            if g.has_edge(i, j) and x <= floor:
                return PatternReport(False, (i, j), "missing_edge_entry")
            if not g.has_edge(i, j) and x > ceiling:
                return PatternReport(False, (i, j), "nonzero_non_edge")
    return PatternReport(True)


# ---- Spectrum -------------------------------------------------------------------


def _cluster(w: np.ndarray, tol: float) -> tuple[tuple[tuple[float, int], ...], bool]:
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    cut = tol * scale
    groups: list[list[float]] = []
    ambiguous = False
    for x in w:
        if groups and x - groups[-1][-1] <= cut:
            groups[-1].append(float(x))
            continue
        if groups and x - groups[-1][-1] <= AMBIGUITY_FACTOR * cut:
            ambiguous = True
        groups.append([float(x)])
    for grp in groups:
        if grp[-1] - grp[0] >= AMBIGUITY_FACTOR * cut:
            ambiguous = True
    return tuple((float(np.mean(grp)), len(grp)) for grp in groups), ambiguous


def _exact_spectrum(a: ExactMatrix) -> tuple[tuple[tuple[float, int], ...], tuple[tuple[str, int], ...]]:
    x = Symbol("x")
    coeffs = to_domain_matrix(a).charpoly()
    poly = Poly([QQ.to_sympy(c) for c in coeffs], x, domain=QQ)
    _, factors = poly.sqf_list()
    clusters: list[tuple[float, int]] = []
    described: list[tuple[str, int]] = []
    for factor, mult in factors:
        described.append((str(factor.as_expr()), mult))
        clusters.extend((float(root.as_real_imag()[0]), mult) for root in factor.nroots(n=30))
    return tuple(sorted(clusters)), tuple(described)


def distinct_eigenvalues(
    a: MatrixLike, *, cluster_tol: float = CLUSTER_TOL, exact: bool | None = None
) -> SpectrumSummary:
    """Count the distinct eigenvalues of a symmetric matrix.

    Exact matrices are handled by square-free factorization of the
    characteristic polynomial over the rationals; the number of distinct
    eigenvalues is the sum of the degrees of the square-free factors.
    Floating matrices are eigen-solved and clustered by relative gap.
    """
    m = to_float(a)
    if not is_symmetric(m):
        raise HypothesisError("not_symmetric")
    w = sla.eigh(m, eigvals_only=True) if m.size else np.zeros(0)
    use_exact = is_exact(a) if exact is None else exact and is_exact(a)
    if use_exact:
        clusters, factors = _exact_spectrum(a)  # type: ignore[arg-type]
        return SpectrumSummary(tuple(float(x) for x in w), clusters, ArithmeticMode.EXACT, factors=factors)

    clusters, ambiguous = _cluster(w, cluster_tol)
    if ambiguous:
        _LOGGER.info("Ambiguous eigenvalue clustering: %s", w)
    return SpectrumSummary(tuple(float(x) for x in w), clusters, ArithmeticMode.FLOATING, ambiguous)


def rational_eigenvalues(a: ExactMatrix) -> tuple[Fraction, ...] | None:
    """Distinct eigenvalues of ``a`` in increasing order when all are rational."""
    x = Symbol("x")
    coeffs = to_domain_matrix(a).charpoly()
    _, factors = Poly([QQ.to_sympy(c) for c in coeffs], x, domain=QQ).factor_list()
    roots: list[Fraction] = []
    for factor, _ in factors:
        if factor.degree() != 1:
            return None
        c1, c0 = factor.all_coeffs()
        root = -c0 / c1
        roots.append(Fraction(int(root.p), int(root.q)))
    return tuple(sorted(set(roots)))


def minimal_polynomial_residual(a: MatrixLike, values: tuple[float, ...]) -> float:
    """Frobenius norm of ``Π (A − λ I)`` over the given eigenvalues."""
    m = to_float(a)
    prod = np.eye(len(m))
    for lam in values:
        prod = prod @ (m - lam * np.eye(len(m)))
    return float(np.linalg.norm(prod))


# ---- Strong Spectral Property ---------------------------------------------------


def _constraint_columns_float(m: FloatMatrix, free: list[tuple[int, int]]) -> FloatMatrix:
    n = len(m)
    iu = np.triu_indices(n, 1)
    cols = np.empty((len(iu[0]), len(free)))
    for c, (u, v) in enumerate(free):
        k = np.zeros((n, n))
        k[:, v] += m[:, u]
        k[:, u] += m[:, v]
        k[u, :] -= m[v, :]
        k[v, :] -= m[u, :]
        cols[:, c] = k[iu]
    return cols


def _constraint_rank_exact(a: ExactMatrix, free: list[tuple[int, int]]) -> tuple[int, int]:
    n = len(a)
    upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rows: list[list[object]] = []
    for i, j in upper:
        row: list[object] = []
        for u, v in free:
            x = Fraction(0)
            if j == v:
                x += a[i][u]
            if j == u:
                x += a[i][v]
            if i == u:
                x -= a[v][j]
            if i == v:
                x -= a[u][j]
            row.append(QQ(x.numerator, x.denominator))
        rows.append(row)
    return DomainMatrix(rows, (len(upper), len(free)), QQ).rank(), len(upper)


def ssp_check(
    a: MatrixLike,
    g: Graph,
    *,
    tol_rank: float = TOL_RANK,
    exact: bool | None = None,
) -> SspReport:
    """Decide whether ``a`` has the Strong Spectral Property with respect to ``g``.

    One unknown is introduced per non-edge of ``g``; the rows are the strict
    upper-triangle entries of the commutator ``AX − XA``. SSP holds iff the
    system has only the trivial solution.
    """
    n = _check_square(a, g)
    report = pattern_check(a, g)
    if not report.ok:
        raise HypothesisError("pattern_mismatch", f"{report.reason} at {report.violation}")
    free = list(g.non_edges())
    rows = n * (n - 1) // 2
    use_exact = is_exact(a) if exact is None else exact and is_exact(a)
    mode = ArithmeticMode.EXACT if use_exact else ArithmeticMode.FLOATING

    if not free:
        return SspReport(mode, rows, 0, 0, SspVerdict.SSP)

    if use_exact:
        rank, rows = _constraint_rank_exact(a, free)  # type: ignore[arg-type]
        kernel = len(free) - rank
        verdict = SspVerdict.SSP if kernel == 0 else SspVerdict.NOT_SSP
        _LOGGER.debug("Exact SSP system %dx%d has kernel %d", rows, len(free), kernel)
        return SspReport(mode, rows, len(free), kernel, verdict)

    sigma = sla.svdvals(_constraint_columns_float(to_float(a), free))
    top = float(sigma[0]) if sigma.size else 0.0
    if top == 0.0:
        return SspReport(mode, rows, len(free), len(free), SspVerdict.NOT_SSP, 0.0, 0.0)
    ratio = float(sigma[-1]) / top
    kernel = int(np.count_nonzero(sigma <= tol_rank * top))
    if ratio >= AMBIGUITY_FACTOR * tol_rank:
        verdict = SspVerdict.SSP
    elif ratio <= tol_rank:
        verdict = SspVerdict.NOT_SSP
    else:
        verdict = SspVerdict.INCONCLUSIVE
        _LOGGER.info("SSP inconclusive: singular ratio %.3g", ratio)
    return SspReport(mode, rows, len(free), kernel, verdict, float(sigma[-1]), ratio)
