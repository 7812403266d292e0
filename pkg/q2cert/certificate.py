"""Certificates and their versioned JSON form.

Exact entries are written as ``"p/q"`` strings, floating entries as JSON
numbers (shortest round-trip representation), matrices row-major. Keys are
sorted so identical certificates serialize byte-identically.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
import json
from typing import Any

import numpy as np

from .const import SCHEMA_VERSION, ArithmeticMode, Construction, RouteTag, Verdict
from .errors import HypothesisError
from .graph import Graph, parse_graph6
from .linalg import ExactMatrix, FloatMatrix
from .realization import Realization
from .spectral import SpectrumSummary, SspReport, SspVerdict
from .structure import ReductionStep, ReductionTrace, StepKind


@dataclass(frozen=True, eq=False)
class Certificate:
    """Everything needed to re-check a verdict without rerunning the search.

    ``witnesses`` holds JSON-ready combinatorial evidence keyed by kind
    (``"split"``, ``"kmn"``, ``"partition"``, ``"join"``, ``"box"``,
    ``"unique_p2"``, ``"family"``). ``trace`` rebuilds the input from
    ``reduced_graph6``; ``inner`` is the certificate a conditional route
    depends on.
    """

    input_graph6: str
    verdict: Verdict
    routes: tuple[RouteTag, ...] = ()
    realization: Realization | None = None
    trace: ReductionTrace = field(default_factory=ReductionTrace)
    reduced_graph6: str | None = None
    witnesses: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0
    tolerances: Mapping[str, float] = field(default_factory=dict)
    conditional: bool = False
    inner: Certificate | None = None
    notes: tuple[str, ...] = ()

    @property
    def graph(self) -> Graph:
        return parse_graph6(self.input_graph6)

    @property
    def ssp(self) -> SspReport | None:
        return None if self.realization is None else self.realization.ssp


# ---- Encoding -------------------------------------------------------------------


def _fraction_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return _fraction_text(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(v) for v in items]
    return value


def _encode_matrix(r: Realization) -> list[list[Any]]:
    if r.exact is not None:
        return [[_fraction_text(x) for x in row] for row in r.exact]
    return [[float(x) for x in row] for row in r.matrix]


def _encode_spectrum(s: SpectrumSummary) -> dict[str, Any]:
    return {
        "ambiguous": s.ambiguous,
        "clusters": [[value, mult] for value, mult in s.clusters],
        "distinct_count": s.distinct_count,
        "eigenvalues": list(s.eigenvalues),
        "factors": [[text, mult] for text, mult in s.factors],
        "mode": str(s.mode),
    }


def _encode_ssp(s: SspReport) -> dict[str, Any]:
    return {
        "constraint_cols": s.constraint_cols,
        "constraint_rows": s.constraint_rows,
        "kernel_dimension": s.kernel_dimension,
        "mode": str(s.mode),
        "notes": list(s.notes),
        "singular_ratio": s.singular_ratio,
        "smallest_singular_value": s.smallest_singular_value,
        "verdict": str(s.verdict),
    }


def encode_realization(r: Realization) -> dict[str, Any]:
    return {
        "construction": str(r.construction),
        "exact": r.is_exact,
        "matrix": _encode_matrix(r),
        "parameters": _jsonable(r.parameters),
        "pattern": str(r.pattern),
        "spectrum": None if r.spectrum is None else _encode_spectrum(r.spectrum),
        "ssp": None if r.ssp is None else _encode_ssp(r.ssp),
    }


def _encode_step(step: ReductionStep) -> dict[str, Any]:
    return {
        "graph_before_hash": step.graph_before_hash,
        "kept": step.kept,
        "kind": str(step.kind),
        "removed": step.removed,
    }


def certificate_to_dict(cert: Certificate) -> dict[str, Any]:
    return {
        "conditional": cert.conditional,
        "inner": None if cert.inner is None else certificate_to_dict(cert.inner),
        "input_graph6": cert.input_graph6,
        "notes": list(cert.notes),
        "realization": None if cert.realization is None else encode_realization(cert.realization),
        "reduced_graph6": cert.reduced_graph6,
        "routes": [str(t) for t in cert.routes],
        "schema": SCHEMA_VERSION,
        "seed": cert.seed,
        "tolerances": dict(cert.tolerances),
        "trace": [_encode_step(s) for s in cert.trace.steps],
        "verdict": str(cert.verdict),
        "witnesses": _jsonable(cert.witnesses),
    }


def certificate_to_json(cert: Certificate, *, indent: int | None = None) -> str:
    return json.dumps(certificate_to_dict(cert), sort_keys=True, indent=indent)


# ---- Decoding -------------------------------------------------------------------


def _decode_matrix(rows: list[list[Any]], exact: bool) -> tuple[FloatMatrix, ExactMatrix | None]:
    if exact:
        entries = tuple(tuple(Fraction(x) for x in row) for row in rows)
        return np.array([[float(x) for x in row] for row in entries]), entries
    return np.array(rows, dtype=float), None


def _decode_spectrum(data: Mapping[str, Any]) -> SpectrumSummary:
    return SpectrumSummary(
        tuple(data["eigenvalues"]),
        tuple((float(v), int(m)) for v, m in data["clusters"]),
        ArithmeticMode(data["mode"]),
        bool(data["ambiguous"]),
        tuple((str(t), int(m)) for t, m in data.get("factors", [])),
    )


def _decode_ssp(data: Mapping[str, Any]) -> SspReport:
    return SspReport(
        ArithmeticMode(data["mode"]),
        int(data["constraint_rows"]),
        int(data["constraint_cols"]),
        int(data["kernel_dimension"]),
        SspVerdict(data["verdict"]),
        data.get("smallest_singular_value"),
        data.get("singular_ratio"),
        tuple(data.get("notes", ())),
    )


def decode_realization(data: Mapping[str, Any]) -> Realization:
    matrix, exact = _decode_matrix(data["matrix"], bool(data["exact"]))
    return Realization(
        matrix,
        parse_graph6(data["pattern"]),
        Construction(data["construction"]),
        dict(data.get("parameters") or {}),
        exact,
        None if data.get("spectrum") is None else _decode_spectrum(data["spectrum"]),
        None if data.get("ssp") is None else _decode_ssp(data["ssp"]),
    )


def _decode_step(data: Mapping[str, Any]) -> ReductionStep:
    return ReductionStep(
        StepKind(data["kind"]), int(data["removed"]), int(data["kept"]), str(data["graph_before_hash"])
    )


def certificate_from_dict(data: Mapping[str, Any]) -> Certificate:
    if data.get("schema") != SCHEMA_VERSION:
        raise HypothesisError("unsupported_schema", str(data.get("schema")))
    try:
        return Certificate(
            input_graph6=str(data["input_graph6"]),
            verdict=Verdict(data["verdict"]),
            routes=tuple(RouteTag(t) for t in data.get("routes", ())),
            realization=None if data.get("realization") is None else decode_realization(data["realization"]),
            trace=ReductionTrace(tuple(_decode_step(s) for s in data.get("trace", ()))),
            reduced_graph6=data.get("reduced_graph6"),
            witnesses=dict(data.get("witnesses") or {}),
            seed=int(data.get("seed", 0)),
            tolerances={k: float(v) for k, v in (data.get("tolerances") or {}).items()},
            conditional=bool(data.get("conditional", False)),
            inner=None if data.get("inner") is None else certificate_from_dict(data["inner"]),
            notes=tuple(data.get("notes", ())),
        )
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as err:
        raise HypothesisError("malformed_certificate", str(err)) from err


def certificate_from_json(text: str) -> Certificate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise HypothesisError("malformed_certificate", str(err)) from err
    if not isinstance(data, dict):
        raise HypothesisError("malformed_certificate", "top level is not an object")
    return certificate_from_dict(data)
