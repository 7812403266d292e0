"""Pattern-constrained numerical searches and isospectral lifting.

All solvers parametrize a symmetric matrix by its diagonal and the entries on
the edges of a graph; entries on non-edges are never variables and so stay
exactly zero.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
import logging
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy import linalg as sla
from scipy.optimize import least_squares

from .config import Q2CertConfig
from .const import SPECTRUM_MATCH_TOL, Construction
from .errors import ConstructionError, HypothesisError
from .graph import Graph
from .linalg import FloatMatrix, random_orthogonal
from .realization import Realization, verify_realization
from .spectral import distinct_eigenvalues, ssp_check

_LOGGER = logging.getLogger(__name__)

MAX_SEARCH_VERTICES = 20
LIFT_PERTURBATIONS = (1e-1, 3e-2, 1e-2, 3e-3)
BARRIER_WEIGHT = 1e-3
BARRIER_SCALE = 1e-2
SEED_EDGE_MIN = 0.1

Vector = NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class SearchResult:
    """Outcome of a randomized search; ``found`` false is inconclusive."""

    found: bool
    realization: Realization | None = None
    restarts: int = 0
    best_residual: float = float("inf")
    notes: tuple[str, ...] = field(default=())


class PatternVariables:
    """Free entries of a symmetric matrix supported on ``g``: diagonal first, then edges."""

    def __init__(self, g: Graph) -> None:
        self.graph = g
        self.n = g.n
        edges = list(g.edges())
        self.pairs: list[tuple[int, int]] = [(i, i) for i in range(g.n)] + edges
        self._rows = np.array([i for i, _ in edges], dtype=int)
        self._cols = np.array([j for _, j in edges], dtype=int)
        self._iu = np.triu_indices(g.n)
        self._weights = np.where(self._iu[0] == self._iu[1], 1.0, np.sqrt(2.0))

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def edge_slice(self) -> slice:
        return slice(self.n, self.size)

    def matrix(self, x: Vector) -> FloatMatrix:
        a = np.diag(x[: self.n]).astype(np.float64)
        if len(self._rows):
            a[self._rows, self._cols] = x[self.n :]
            a[self._cols, self._rows] = x[self.n :]
        return a

    def vector(self, a: FloatMatrix) -> Vector:
        return np.concatenate([np.diag(a), a[self._rows, self._cols]])

    def upper(self, m: FloatMatrix) -> Vector:
        """Upper triangle weighted so that its norm is the Frobenius norm of ``m``."""
        return m[self._iu] * self._weights

    def direction_products(
        self, left: FloatMatrix, right: FloatMatrix
    ) -> FloatMatrix:
        """Columns ``upper(L·dA·R)`` for each unit direction ``dA``."""
        jac = np.empty((len(self._iu[0]), self.size))
        for c, (i, j) in enumerate(self.pairs):
            k = np.outer(left[:, i], right[j, :])
            if i != j:
                k += np.outer(left[:, j], right[i, :])
            jac[:, c] = self.upper(k)
        return jac


# ---- Orthogonal-symmetric objective ---------------------------------------------


def _square_residual(pv: PatternVariables) -> tuple[Callable[[Vector], Vector], Callable[[Vector], FloatMatrix]]:
    eye = np.eye(pv.n)

    def fun(x: Vector) -> Vector:
        a = pv.matrix(x)
        return pv.upper(a @ a - eye)

    def jac(x: Vector) -> FloatMatrix:
        a = pv.matrix(x)
        return pv.direction_products(a, eye) + pv.direction_products(eye, a)

    return fun, jac


def objective_value(a: FloatMatrix) -> float:
    e = a @ a - np.eye(len(a))
    return float(np.sum(e * e))


def objective_gradient(pv: PatternVariables, x: Vector) -> Vector:
    """Analytic gradient of ``‖A² − I‖²_F`` with respect to the free entries."""
    a = pv.matrix(x)
    ae = a @ (a @ a - np.eye(pv.n))
    grad = np.empty(pv.size)
    for c, (i, j) in enumerate(pv.pairs):
        grad[c] = 4 * ae[i, i] if i == j else 4 * (ae[i, j] + ae[j, i])
    return grad


def objective_gradient_check(g: Graph, points: int = 100, seed: int = 0) -> float:
    """Worst relative gap between the analytic gradient and central differences."""
    pv = PatternVariables(g)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        x = rng.standard_normal(pv.size)
        analytic = objective_gradient(pv, x)
        numeric = np.empty(pv.size)
        for c in range(pv.size):
            h = 1e-6 * max(1.0, abs(x[c]))
            up, down = x.copy(), x.copy()
            up[c] += h
            down[c] -= h
            numeric[c] = (objective_value(pv.matrix(up)) - objective_value(pv.matrix(down))) / (2 * h)
        scale = max(float(np.linalg.norm(analytic)), 1e-12)
        worst = max(worst, float(np.linalg.norm(analytic - numeric)) / scale)
    _LOGGER.debug("Gradient self-test on %s: worst relative error %.3g", g, worst)
    return worst


# ---- Generic searches -----------------------------------------------------------


def _check_searchable(g: Graph) -> None:
    if g.n > MAX_SEARCH_VERTICES:
        raise HypothesisError("search_graph_too_large", str(g.n))
    if not g.is_connected():
        raise HypothesisError("search_graph_disconnected")


def _seed_matrix(pv: PatternVariables, rng: np.random.Generator) -> Vector:
    n = pv.n
    q = random_orthogonal(rng, n)
    d = np.ones(n)
    d[: n // 2] = -1.0
    x = pv.vector((q * d) @ q.T)
    edges = x[pv.edge_slice]
    small = np.abs(edges) < SEED_EDGE_MIN
    edges[small] = np.where(edges[small] < 0, -SEED_EDGE_MIN, SEED_EDGE_MIN)
    x[pv.edge_slice] = edges
    return x


def _with_barrier(
    pv: PatternVariables,
    fun: Callable[[Vector], Vector],
    jac: Callable[[Vector], FloatMatrix] | str,
) -> tuple[Callable[[Vector], Vector], Callable[[Vector], FloatMatrix] | str]:
    """Add residuals ``√w·τ/a_e`` keeping edge entries away from zero."""
    weight = np.sqrt(BARRIER_WEIGHT) * BARRIER_SCALE
    m = pv.size - pv.n

    def bfun(x: Vector) -> Vector:
        edges = x[pv.edge_slice]
        return np.concatenate([fun(x), weight / edges])

    if isinstance(jac, str):
        return bfun, jac

    def bjac(x: Vector) -> FloatMatrix:
        edges = x[pv.edge_slice]
        barrier = np.zeros((m, pv.size))
        barrier[np.arange(m), pv.n + np.arange(m)] = -weight / edges**2
        return np.vstack([jac(x), barrier])

    return bfun, bjac


def _solve(
    pv: PatternVariables,
    x0: Vector,
    fun: Callable[[Vector], Vector],
    jac: Callable[[Vector], FloatMatrix] | str,
) -> Vector:
    if pv.size > pv.n:
        bfun, bjac = _with_barrier(pv, fun, jac)
        x0 = least_squares(bfun, x0, jac=bjac, method="trf", max_nfev=200 * pv.size).x
    return least_squares(
        fun, x0, jac=jac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15
    ).x


def generic_q2_search(
    g: Graph,
    restarts: int | None = None,
    seed: int | None = None,
    config: Q2CertConfig | None = None,
) -> SearchResult:
    """Look for a symmetric orthogonal matrix in the pattern class of ``g``.

    Restart ``r`` draws from ``default_rng([seed, r])`` so outcomes do not
    depend on how many restarts ran before. The first success by restart
    index is returned; exhausting the budget is inconclusive.
    """
    cfg = config if config is not None else Q2CertConfig()
    restarts = cfg.restarts if restarts is None else restarts
    seed = cfg.seed if seed is None else seed
    _check_searchable(g)
    pv = PatternVariables(g)
    fun, jac = _square_residual(pv)
    best = float("inf")

    for restart in range(restarts):
        rng = np.random.default_rng([seed, restart])
        try:
            x = _solve(pv, _seed_matrix(pv, rng), fun, jac)
        except (ValueError, np.linalg.LinAlgError) as err:
            _LOGGER.debug("Restart %d failed numerically: %s", restart, err)
            continue
        residual = float(np.linalg.norm(fun(x)))
        best = min(best, residual)
        edges = np.abs(x[pv.edge_slice])
        _LOGGER.debug("Restart %d: residual %.3g, smallest edge %.3g", restart, residual, edges.min(initial=np.inf))
        if residual >= cfg.tol_residual or (edges.size and edges.min() < cfg.nonzero_floor):
            continue
        a = pv.matrix(x)
        r = Realization(a, g, Construction.SEARCH, {"seed": seed, "restart": restart})
        try:
            r = verify_realization(r, cfg, require_ssp=False)
        except ConstructionError as err:
            _LOGGER.debug("Restart %d rejected: %s", restart, err.code)
            continue
        r = replace(r, ssp=ssp_check(a, g, tol_rank=cfg.tol_rank))
        return SearchResult(True, r, restart + 1, residual)

    return SearchResult(False, None, restarts, best, ("search_exhausted",))


def three_eigenvalue_search(
    g: Graph,
    restarts: int | None = None,
    seed: int | None = None,
    config: Q2CertConfig | None = None,
) -> SearchResult:
    """Look for a matrix in the class of ``g`` with eigenvalues ``{−1, t, 1}``."""
    cfg = config if config is not None else Q2CertConfig()
    restarts = cfg.restarts if restarts is None else restarts
    seed = cfg.seed if seed is None else seed
    _check_searchable(g)
    pv = PatternVariables(g)
    eye = np.eye(pv.n)

    def fun(z: Vector) -> Vector:
        a = pv.matrix(z[:-1])
        t = z[-1]
        return pv.upper((a + eye) @ (a - t * eye) @ (a - eye))

    best = float("inf")
    for restart in range(restarts):
        rng = np.random.default_rng([seed, restart])
        z0 = np.append(_seed_matrix(pv, rng), rng.uniform(-0.5, 0.5))
        try:
            z = least_squares(fun, z0, jac="2-point", method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15).x
        except (ValueError, np.linalg.LinAlgError):
            continue
        residual = float(np.linalg.norm(fun(z)))
        best = min(best, residual)
        edges = np.abs(z[pv.n : -1])
        if residual >= cfg.tol_residual or (edges.size and edges.min() < cfg.nonzero_floor):
            continue
        r = Realization(pv.matrix(z[:-1]), g, Construction.SEARCH, {"seed": seed, "restart": restart, "middle": float(z[-1])})
        try:
            r = verify_realization(r, cfg, distinct=3, require_ssp=False)
        except ConstructionError:
            continue
        return SearchResult(True, r, restart + 1, residual)
    return SearchResult(False, None, restarts, best, ("search_exhausted",))


# ---- Isospectral supergraph lifting ---------------------------------------------


def _lift_system(
    pv: PatternVariables, values: Sequence[float], power_sums: Sequence[float], scale: float
) -> tuple[Callable[[Vector], Vector], Callable[[Vector], FloatMatrix]]:
    """Minimal polynomial of the target spectrum plus low power sums."""
    eye = np.eye(pv.n)
    q = len(values)

    def factors(a: FloatMatrix) -> list[FloatMatrix]:
        return [(a - lam * eye) / scale for lam in values]

    def fun(x: Vector) -> Vector:
        a = pv.matrix(x)
        prod = eye
        for f in factors(a):
            prod = prod @ f
        traces = [
            (np.trace(np.linalg.matrix_power(a, k)) - power_sums[k]) / scale**k
            for k in range(1, q)
        ]
        return np.concatenate([pv.upper(prod), traces])

    def jac(x: Vector) -> FloatMatrix:
        a = pv.matrix(x)
        fs = factors(a)
        block = np.zeros((len(pv.upper(eye)), pv.size))
        for i in range(q):
            left, right = eye, eye
            for f in fs[:i]:
                left = left @ f
            for f in fs[i + 1 :]:
                right = right @ f
            block += pv.direction_products(left, right) / scale
        rows = []
        for k in range(1, q):
            p = np.linalg.matrix_power(a, k - 1)
            rows.append(
                [k * p[i, i] / scale**k if i == j else 2 * k * p[i, j] / scale**k for i, j in pv.pairs]
            )
        return np.vstack([block, np.array(rows).reshape(q - 1, pv.size)])

    return fun, jac


def supergraph_lift(
    a: Realization,
    gsup: Graph,
    config: Q2CertConfig | None = None,
    seed: int | None = None,
) -> Realization:
    """Move a realization with the SSP onto a supergraph, keeping its spectrum.

    The seed is ``a`` plus a small random perturbation on the new edges,
    projected back onto the isospectral set by Levenberg-Marquardt. Larger
    perturbations are tried first.
    """
    cfg = config if config is not None else Q2CertConfig()
    seed = cfg.seed if seed is None else seed
    if gsup.n != a.n or any(not gsup.has_edge(u, v) for u, v in a.pattern.edges()):
        raise HypothesisError("not_a_supergraph")
    ssp = a.ssp or ssp_check(a.best(), a.pattern, tol_rank=cfg.tol_rank)
    if not ssp.has_ssp:
        raise HypothesisError("lift_needs_ssp", str(ssp.verdict))
    new_edges = [e for e in gsup.edges() if not a.pattern.has_edge(*e)]
    if not new_edges:
        return a

    spectrum = a.spectrum or distinct_eigenvalues(a.best(), cluster_tol=cfg.cluster_tol)
    values = spectrum.values
    target = np.sort(np.asarray(spectrum.eigenvalues))
    scale = max(1.0, float(np.max(np.abs(target))))
    power_sums = [float(np.sum(target**k)) for k in range(len(values))]
    pv = PatternVariables(gsup)
    fun, jac = _lift_system(pv, values, power_sums, scale)
    new_idx = [pv.pairs.index(e) for e in new_edges]
    diagnostics: dict[str, Any] = {"new_edges": new_edges, "attempts": []}

    for attempt, t in enumerate(LIFT_PERTURBATIONS):
        rng = np.random.default_rng([seed, attempt])
        x0 = pv.vector(a.matrix)
        x0[new_idx] = t * scale * rng.choice([-1.0, 1.0], len(new_idx)) * rng.uniform(0.5, 1.0, len(new_idx))
        try:
            x = least_squares(fun, x0, jac=jac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15).x
        except (ValueError, np.linalg.LinAlgError) as err:
            diagnostics["attempts"].append({"t": t, "error": str(err)})
            continue
        m = pv.matrix(x)
        drift = float(np.max(np.abs(np.sort(sla.eigh(m, eigvals_only=True)) - target)))
        smallest = float(np.min(np.abs(x[new_idx])))
        _LOGGER.debug("Lift attempt t=%g: spectral drift %.3g, smallest new entry %.3g", t, drift, smallest)
        diagnostics["attempts"].append({"t": t, "drift": drift, "smallest_new": smallest})
        if drift > SPECTRUM_MATCH_TOL * scale or smallest < cfg.nonzero_floor:
            continue
        r = Realization(
            m, gsup, Construction.LIFT,
            {"perturbation": t, "seed": seed, "source": str(a.construction), "new_edges": len(new_edges)},
        )
        try:
            return verify_realization(r, cfg, distinct=len(values))
        except ConstructionError as err:
            diagnostics["attempts"][-1]["rejected"] = err.code
    raise ConstructionError("lift_not_converged", diagnostics)
