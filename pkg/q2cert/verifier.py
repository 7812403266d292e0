"""Replay a certificate from its own contents and report the first failing step."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass
import logging
from typing import Any

import numpy as np

from .certificate import Certificate
from .config import Q2CertConfig
from .const import SPECTRUM_MATCH_TOL, RouteTag, Verdict
from .errors import Q2CertError, VerificationError
from .graph import (
    FamilyKind,
    Graph,
    OddCycle,
    PartiteSplit,
    bipartition,
    complement,
    components,
    parse_graph6,
    recognize,
)
from .matching import BoxCertificate
from .partition import BalancedPartition
from .spectral import distinct_eigenvalues, minimal_polynomial_residual, pattern_check, ssp_check
from .structure import cycle_join_shape, find_spanning_split

_LOGGER = logging.getLogger(__name__)


class StepFailure(Exception):
    """Raised inside a verification step with a human-readable reason."""


@dataclass(frozen=True, slots=True)
class StepResult:
    name: str
    ok: bool
    message: str = ""


@dataclass(frozen=True, slots=True)
class VerificationReport:
    verdict: Verdict
    steps: tuple[StepResult, ...]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    @property
    def failing_step(self) -> StepResult | None:
        return next((s for s in self.steps if not s.ok), None)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise StepFailure(message)


# ---- Individual checks ----------------------------------------------------------


class _Checker:
    """Holds the decoded graph and tolerances while the steps run."""

    def __init__(self, cert: Certificate, config: Q2CertConfig) -> None:
        self.cert = cert
        self.config = config
        self.g: Graph = Graph.empty(0)
        self.gbar: Graph = Graph.empty(0)

    def parse_input(self) -> None:
        self.g = parse_graph6(self.cert.input_graph6)
        self.gbar = complement(self.g)
        _require(self.g.is_connected(), "input graph is disconnected")

    def tolerances(self) -> None:
        looser = self.config.looser_tolerances(self.cert.tolerances)
        _require(not looser, f"certificate loosens {', '.join(looser)}")

    def trace_replay(self) -> None:
        if not self.cert.trace.steps:
            return
        _require(self.cert.reduced_graph6 is not None, "trace without a reduced graph")
        rebuilt = self.cert.trace.replay(parse_graph6(self.cert.reduced_graph6 or ""))
        _require(rebuilt == self.g, "trace does not rebuild the input graph")

    def realization_pattern(self) -> None:
        r = self.cert.realization
        if r is None:
            return
        _require(r.pattern == self.g, "realization pattern is not the input graph")
        report = pattern_check(
            r.best(), self.g, floor=self.config.pattern_floor, ceiling=self.config.zero_ceiling
        )
        _require(report.ok, f"{report.reason} at {report.violation}")

    def eigenvalue_count(self) -> None:
        r = self.cert.realization
        if r is None:
            return
        expected = 2 if self.cert.verdict is Verdict.Q2 else 3
        spectrum = distinct_eigenvalues(r.best(), cluster_tol=self.config.cluster_tol)
        _require(not spectrum.ambiguous, "eigenvalue clustering is ambiguous")
        _require(
            spectrum.distinct_count == expected,
            f"expected {expected} distinct eigenvalues, found {spectrum.distinct_count}",
        )
        if r.spectrum is not None:
            _require(
                r.spectrum.distinct_count == spectrum.distinct_count,
                "recorded spectrum disagrees with recomputation",
            )
        scale = max(1.0, float(np.max(np.abs(spectrum.eigenvalues), initial=0.0)))
        residual = minimal_polynomial_residual(r.matrix, spectrum.values)
        _require(
            residual <= SPECTRUM_MATCH_TOL * scale**expected * r.n,
            f"minimal polynomial residual {residual:.3g}",
        )

    def ssp(self) -> None:
        r = self.cert.realization
        if r is None or r.ssp is None or not r.ssp.has_ssp:
            return
        report = ssp_check(r.best(), self.g, tol_rank=self.config.tol_rank)
        _require(report.has_ssp, f"claimed SSP but verdict is {report.verdict}")

    def witnesses(self) -> None:
        for key, record in sorted(self.cert.witnesses.items()):
            if (check := _WITNESS_CHECKS.get(key)) is None:
                raise StepFailure(f"unknown witness kind {key}")
            check(self, record)

    def routes(self) -> None:
        n, e = self.g.n, self.gbar.edge_count
        w = self.cert.witnesses
        lead = self.cert.routes[0] if self.cert.routes else None
        split = bipartition(self.gbar)
        bipartite = isinstance(split, PartiteSplit)
        match lead:
            case RouteTag.COMPLETE:
                _require(e == 0, "complete route on a graph with complement edges")
            case RouteTag.LB1:
                _require(n >= 3 and e <= n // 2 - 1, "join bound does not hold")
                _require("join" in w, "join route without a join witness")
            case RouteTag.NGTHM:
                _require(bipartite and e <= n - 2, "complement is not a sparse bipartite graph")
                _require("kmn" in w, "missing split record")
            case RouteTag.BOX_PRODUCT:
                _require(bipartite and e <= n - 3, "complement is not a sparse bipartite graph")
                _require("box" in w, "missing prism witness")
            case RouteTag.TIGHT_CHAR:
                _require(bipartite and e == n - 2, "tight route outside its edge count")
            case RouteTag.TRI_CYC | RouteTag.K3BAR_JOIN:
                shape = cycle_join_shape(self.gbar)
                _require(
                    shape is not None and shape[1] == (lead is RouteTag.K3BAR_JOIN),
                    "complement has the wrong shape",
                )
            case RouteTag.JOIN_CLIQUE:
                iso = len(self.gbar.isolated_vertices())
                _require(0 < n - iso <= iso, "too few dominating vertices")
            case RouteTag.K2_JOIN:
                _require(len(self.gbar.isolated_vertices()) >= 2, "fewer than two dominating vertices")
                _require(self.cert.inner is not None and "k2join" in w, "missing inner certificate")
            case _:
                pass
        if RouteTag.UNIQUE_P2 in self.cert.routes:
            _require("unique_p2" in w, "lower-bound route without its witness")

    def verdict(self) -> None:
        c = self.cert
        if c.verdict is Verdict.Q2:
            _require(c.realization is not None, "Q2 without a realization")
            _require(bool(c.routes), "Q2 without a route")
        elif c.verdict is Verdict.Q3:
            _require("unique_p2" in c.witnesses, "Q3 without a unique-path witness")
            _require(
                "family" in c.witnesses or c.realization is not None,
                "Q3 without an upper-bound witness",
            )

    def inner(self) -> None:
        inner = self.cert.inner
        if inner is None:
            return
        record = self.cert.witnesses.get("k2join", {})
        removed = int(record.get("removed", -1))
        _require(0 <= removed < self.g.n, "removed vertex out of range")
        _require(inner.graph == self.g.remove_vertex(removed), "inner graph is not the peeled input")
        report = verify_certificate(inner, self.config)
        _require(report.ok, f"inner certificate failed at {report.failing_step}")
        _require(inner.verdict is Verdict.Q2, "inner certificate is not Q2")


# ---- Witness checks -------------------------------------------------------------


def _check_join(chk: _Checker, record: Mapping[str, Any]) -> None:
    left, right = (frozenset(int(v) for v in part) for part in record["parts"])
    _require(not left & right and left | right == frozenset(range(chk.g.n)), "join parts do not partition")
    _require(all(chk.g.has_edge(u, v) for u in left for v in right), "parts are not joined")
    for part in (left, right):
        _require(chk.g.induced(part).is_connected(), "join part is disconnected")
    slack = 2
    if (removed := record.get("removed")) is not None:
        isolated = set(chk.gbar.isolated_vertices())
        _require({int(removed), int(record["twin"])} <= isolated, "duplicated vertex is not dominating")
        _require((int(removed) in left) == (int(record["twin"]) in left), "duplicate split from its twin")
        slack = 3
    _require(abs(len(left) - len(right)) <= slack, "join parts differ too much in order")


def _partition_base(chk: _Checker) -> Graph:
    removed = chk.cert.witnesses.get("join", {}).get("removed")
    return chk.gbar if removed is None else complement(chk.g.remove_vertex(int(removed)))


def _check_partition(chk: _Checker, record: Mapping[str, Any]) -> None:
    p = BalancedPartition(
        tuple(int(x) for x in record["sizes"]),
        frozenset(int(i) for i in record["a"]),
        frozenset(int(i) for i in record["b"]),
    )
    _require(p.is_valid(), "partition index sets are not a partition")
    _require(p.difference <= 1, f"partition difference {p.difference}")
    expected = sorted((len(c) for c in components(_partition_base(chk))), reverse=True)
    _require(list(p.sizes) == expected, "sizes are not the complement component orders")


def _record_split(chk: _Checker, record: Mapping[str, Any]) -> PartiteSplit:
    split = PartiteSplit(
        frozenset(int(v) for v in record["left"]), frozenset(int(v) for v in record["right"])
    )
    _require(split.is_valid_for(chk.gbar), "recorded split is not a bipartition of the complement")
    return split


def _check_split(chk: _Checker, record: Mapping[str, Any]) -> None:
    _record_split(chk, record)


def _check_kmn(chk: _Checker, record: Mapping[str, Any]) -> None:
    split = _record_split(chk, record)
    _require(bool(split.left) and bool(split.right), "a partite side is empty")
    _require(find_spanning_split(chk.gbar, split) is None, "complement has a spanning double biclique")


def _check_box(chk: _Checker, record: Mapping[str, Any]) -> None:
    host = parse_graph6(record["graph6"])
    allowed = {chk.cert.input_graph6, chk.cert.reduced_graph6}
    _require(str(host) in allowed, "prism witness refers to an unrelated graph")
    cert = BoxCertificate(
        tuple(int(v) for v in record["side_x"]),
        tuple(int(v) for v in record["side_y"]),
        tuple((int(u), int(v)) for u, v in record["matching"]),
    )
    _require(cert.is_valid_for(host), "prism witness is invalid")


def _check_unique_p2(chk: _Checker, record: Any) -> None:
    x, u, y = (int(v) for v in record)
    g = chk.g
    _require(x != y and not g.has_edge(x, y), "path ends are adjacent")
    common = set(g.neighbors(x)) & set(g.neighbors(y))
    _require(common == {u}, f"common neighbourhood is {sorted(common)}")


def _check_family(chk: _Checker, record: Mapping[str, Any]) -> None:
    family = recognize(chk.gbar)
    _require(family.kind is FamilyKind(record["kind"]), f"complement is {family.kind}")
    _require(list(family.params) == [int(p) for p in record["params"]], "family parameters differ")


def _check_k2join(chk: _Checker, record: Mapping[str, Any]) -> None:
    isolated = set(chk.gbar.isolated_vertices())
    _require({int(record["removed"]), int(record["twin"])} <= isolated, "peeled vertices are not dominating")


def _check_odd_cycle(chk: _Checker, record: Any) -> None:
    _require(OddCycle(tuple(int(v) for v in record)).is_valid_for(chk.gbar), "odd cycle witness invalid")


_WITNESS_CHECKS: dict[str, Callable[[_Checker, Any], None]] = {
    "box": _check_box,
    "family": _check_family,
    "join": _check_join,
    "k2join": _check_k2join,
    "kmn": _check_kmn,
    "odd_cycle": _check_odd_cycle,
    "partition": _check_partition,
    "split": _check_split,
    "unique_p2": _check_unique_p2,
}


# ---- Entry point ----------------------------------------------------------------


def verify_certificate(
    cert: Certificate, config: Q2CertConfig | None = None, *, strict: bool = False
) -> VerificationReport:
    """Re-check every claim a certificate makes, stopping at the first failure.

    With ``strict`` a failure raises :class:`VerificationError` naming the step.
    """
    chk = _Checker(cert, config or Q2CertConfig())
    steps: list[StepResult] = []
    for name in (
        "parse_input",
        "tolerances",
        "trace_replay",
        "realization_pattern",
        "eigenvalue_count",
        "ssp",
        "witnesses",
        "routes",
        "verdict",
        "inner",
    ):
        try:
            getattr(chk, name)()
        except (StepFailure, Q2CertError, ValueError, KeyError, TypeError) as err:
            message = str(err) or type(err).__name__
            steps.append(StepResult(name, False, message))
            _LOGGER.debug("Certificate for %s failed at %s: %s", cert.input_graph6, name, message)
            if strict:
                raise VerificationError(name, message) from err
            break
        steps.append(StepResult(name, True))
    return VerificationReport(cert.verdict, tuple(steps))
