"""Exceptions raised by q2cert."""

from __future__ import annotations

from collections.abc import Mapping
from typing import Any


class Q2CertError(Exception):
    """Base class for q2cert errors."""


class GraphFormatError(Q2CertError, ValueError):
    """A graph6 word could not be decoded."""

    def __init__(self, code: str, offset: int) -> None:
        super().__init__(f"{code} at byte {offset}")
        self.code = code
        self.offset = offset


class HypothesisError(Q2CertError, ValueError):
    """An operation was called outside its hypotheses."""

    def __init__(self, code: str, detail: str | None = None) -> None:
        super().__init__(code if detail is None else f"{code}: {detail}")
        self.code = code
        self.detail = detail


class ConstructionError(Q2CertError, RuntimeError):
    """A numerical construction did not converge within its retry budget."""

    def __init__(self, code: str, diagnostics: Mapping[str, Any] | None = None) -> None:
        super().__init__(code)
        self.code = code
        self.diagnostics: dict[str, Any] = dict(diagnostics or {})


class LemmaContradictionError(ConstructionError):
    """A construction guaranteed by a theorem failed; carries the offending witness."""


class VerificationError(Q2CertError):
    """A certificate failed strict verification."""

    def __init__(self, step: str, message: str) -> None:
        super().__init__(f"{step}: {message}")
        self.step = step
        self.message = message


class CounterexampleError(Q2CertError):
    """A sweep found a graph contradicting the expected classification."""

    def __init__(self, graph6: str, reason: str, certificate_json: str) -> None:
        super().__init__(f"{reason}: {graph6}")
        self.graph6 = graph6
        self.reason = reason
        self.certificate_json = certificate_json
