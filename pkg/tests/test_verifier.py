from __future__ import annotations

from collections.abc import Callable
from dataclasses import replace

import numpy as np
import pytest

from q2cert.certificate import Certificate, certificate_from_json, certificate_to_json
from q2cert.config import Q2CertConfig
from q2cert.const import Construction, RouteTag, Verdict
from q2cert.errors import VerificationError
from q2cert.graph import Graph, parse_graph6
from q2cert.pipeline import classify
from q2cert.realization import Realization
from q2cert.verifier import verify_certificate

from .graphs import co, co_of


@pytest.fixture
def k5_certificate() -> Certificate:
    return classify(Graph.complete(5))


def _with_matrix(cert: Certificate, matrix: np.ndarray) -> Certificate:
    assert cert.realization is not None
    r = Realization(matrix, cert.realization.pattern, Construction.SEARCH)
    return replace(cert, realization=r)


def test_valid_certificate_passes(k5_certificate: Certificate) -> None:
    report = verify_certificate(k5_certificate)
    assert report.ok
    assert report.failing_step is None
    assert [s.name for s in report.steps][-1] == "inner"


def test_decoded_certificate_passes(k5_certificate: Certificate) -> None:
    decoded = certificate_from_json(certificate_to_json(k5_certificate))
    assert verify_certificate(decoded).ok


def test_zeroed_edge_entry_fails_pattern(k5_certificate: Certificate) -> None:
    assert k5_certificate.realization is not None
    m = k5_certificate.realization.matrix.copy()
    m[0, 1] = m[1, 0] = 0.0
    report = verify_certificate(_with_matrix(k5_certificate, m))
    assert not report.ok
    assert report.failing_step is not None
    assert report.failing_step.name == "realization_pattern"
    assert "missing_edge_entry" in report.failing_step.message


def test_wrong_input_graph_fails(k5_certificate: Certificate) -> None:
    cert = replace(k5_certificate, input_graph6=str(co(5, [(0, 1)])))
    report = verify_certificate(cert)
    assert report.failing_step is not None
    assert report.failing_step.name == "realization_pattern"


def test_wrong_verdict_fails_eigenvalue_count(k5_certificate: Certificate) -> None:
    report = verify_certificate(replace(k5_certificate, verdict=Verdict.Q3))
    assert report.failing_step is not None
    assert report.failing_step.name == "eigenvalue_count"


def test_route_without_its_witness_fails(k5_certificate: Certificate) -> None:
    report = verify_certificate(replace(k5_certificate, routes=(RouteTag.LB1,)))
    assert report.failing_step is not None
    assert report.failing_step.name == "routes"


def test_unknown_witness_kind_fails(k5_certificate: Certificate) -> None:
    report = verify_certificate(replace(k5_certificate, witnesses={"mystery": []}))
    assert report.failing_step is not None
    assert report.failing_step.name == "witnesses"


def test_bad_unique_path_witness_fails(k5_certificate: Certificate) -> None:
    report = verify_certificate(replace(k5_certificate, witnesses={"unique_p2": [0, 1, 2]}))
    assert report.failing_step is not None
    assert report.failing_step.name == "witnesses"


def test_strict_mode_raises(k5_certificate: Certificate) -> None:
    with pytest.raises(VerificationError) as err:
        verify_certificate(replace(k5_certificate, verdict=Verdict.Q3), strict=True)
    assert err.value.step == "eigenvalue_count"



def _dense_star_certificate(tolerances: dict[str, float]) -> Certificate:
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    m = 0.5 * np.ones((4, 4)) - np.eye(4)
    return Certificate(
        str(star),
        Verdict.Q2,
        routes=(RouteTag.SEARCH,),
        realization=Realization(m, star, Construction.SEARCH),
        tolerances=tolerances,
    )


def test_certificate_cannot_loosen_tolerances() -> None:
    forged = certificate_from_json(certificate_to_json(_dense_star_certificate({"zero_ceiling": 1.0})))
    report = verify_certificate(forged)
    assert not report.ok
    assert report.failing_step is not None
    assert report.failing_step.name == "tolerances"
    assert "zero_ceiling" in report.failing_step.message


def test_dense_matrix_on_a_star_fails_pattern() -> None:
    report = verify_certificate(_dense_star_certificate(Q2CertConfig().tolerances()))
    assert report.failing_step is not None
    assert report.failing_step.name == "realization_pattern"
    assert "nonzero_non_edge" in report.failing_step.message


def test_stricter_certificate_tolerances_are_accepted(k5_certificate: Certificate) -> None:
    stricter = {**k5_certificate.tolerances, "zero_ceiling": 1e-14, "tol_rank": 1e-6}
    assert verify_certificate(replace(k5_certificate, tolerances=stricter)).ok


# ---- Mutations of a join certificate ----


@pytest.fixture
def join_certificate(no_search: None) -> Certificate:
    cert = classify(co_of(Graph.complete(2), isolated=5))
    assert cert.routes[0] is RouteTag.LB1
    assert cert.trace.steps
    assert verify_certificate(cert).ok
    return cert


def _witness(cert: Certificate, key: str, **changes: object) -> Certificate:
    return replace(cert, witnesses={**cert.witnesses, key: {**cert.witnesses[key], **changes}})


def _without(cert: Certificate, *keys: str) -> Certificate:
    return replace(cert, witnesses={k: v for k, v in cert.witnesses.items() if k not in keys})


@pytest.mark.parametrize(
    ("mutate", "step"),
    [
        (lambda c: replace(c, verdict=Verdict.Q3), "eigenvalue_count"),
        (lambda c: replace(c, verdict=Verdict.UNKNOWN), "eigenvalue_count"),
        (lambda c: replace(c, tolerances={**c.tolerances, "cluster_tol": 0.5}), "tolerances"),
        (lambda c: replace(c, tolerances={**c.tolerances, "pattern_floor": 1e-30}), "tolerances"),
        (lambda c: replace(c, tolerances={**c.tolerances, "tol_rank": -1.0}), "tolerances"),
        (lambda c: replace(c, reduced_graph6=str(Graph.empty(parse_graph6(c.reduced_graph6 or "").n))), "trace_replay"),
        (lambda c: _without(c, "join", "partition"), "routes"),
        (lambda c: _witness(c, "join", removed=0), "witnesses"),
        (lambda c: _witness(c, "partition", sizes=[*c.witnesses["partition"]["sizes"], 1]), "witnesses"),
        (lambda c: replace(c, witnesses={**c.witnesses, "unique_p2": [0, 2, 1]}), "witnesses"),
        (lambda c: replace(c, routes=(RouteTag.COMPLETE,)), "routes"),
        (lambda c: replace(c, routes=()), "verdict"),
    ],
)
def test_join_certificate_mutations_are_rejected(
    join_certificate: Certificate, mutate: Callable[[Certificate], Certificate], step: str
) -> None:
    report = verify_certificate(certificate_from_json(certificate_to_json(mutate(join_certificate))))
    assert report.failing_step is not None
    assert report.failing_step.name == step


@pytest.mark.slow
def test_random_entry_mutations_are_rejected(k5_certificate: Certificate) -> None:
    assert k5_certificate.realization is not None
    base = k5_certificate.realization.matrix
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        i, j = rng.choice(5, size=2, replace=False)
        delta = rng.choice((-1.0, 1.0)) * 10.0 ** rng.uniform(-4, 0)
        m = base.copy()
        m[i, j] += delta
        m[j, i] += delta
        assert not verify_certificate(_with_matrix(k5_certificate, m)).ok, (i, j, delta)
