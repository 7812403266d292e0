"""Certify that dense graphs admit a two-eigenvalue symmetric realization."""

from __future__ import annotations

from .certificate import Certificate, certificate_from_json, certificate_to_json
from .config import Q2CertConfig
from .const import RouteTag, Verdict
from .graph import Graph, complement, parse_graph6, write_graph6
from .pipeline import classify, conjecture_sweep
from .verifier import VerificationReport, verify_certificate

__all__ = [
    "Certificate",
    "Graph",
    "Q2CertConfig",
    "RouteTag",
    "Verdict",
    "VerificationReport",
    "certificate_from_json",
    "certificate_to_json",
    "classify",
    "complement",
    "conjecture_sweep",
    "parse_graph6",
    "verify_certificate",
    "write_graph6",
]
