"""The Realization type and the postcondition every construction must pass."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
import logging
from typing import Any

from .config import Q2CertConfig
from .const import Construction
from .errors import ConstructionError
from .graph import Graph
from .linalg import ExactMatrix, FloatMatrix, permute_exact, permute_float, to_float
from .spectral import (
    SpectrumSummary,
    SspReport,
    distinct_eigenvalues,
    pattern_check,
    ssp_check,
)

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Realization:
    """A symmetric matrix in the pattern class of ``pattern``.

    ``exact`` holds rational entries when the construction permits it;
    ``matrix`` is always the floating image.
    """

    matrix: FloatMatrix
    pattern: Graph
    construction: Construction
    parameters: Mapping[str, Any] = field(default_factory=dict)
    exact: ExactMatrix | None = None
    spectrum: SpectrumSummary | None = None
    ssp: SspReport | None = None

    @classmethod
    def from_exact(
        cls,
        exact: ExactMatrix,
        pattern: Graph,
        construction: Construction,
        parameters: Mapping[str, Any] | None = None,
    ) -> Realization:
        return cls(to_float(exact), pattern, construction, dict(parameters or {}), exact)

    @property
    def n(self) -> int:
        return self.pattern.n

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def best(self) -> ExactMatrix | FloatMatrix:
        return self.exact if self.exact is not None else self.matrix

    def permuted(self, perm: Sequence[int], pattern: Graph | None = None) -> Realization:
        """Relabel vertex ``old`` as ``perm[old]``.

        Spectrum and SSP reports survive a pure relabelling; an explicit
        ``pattern`` drops them.
        """
        return replace(
            self,
            matrix=permute_float(self.matrix, perm),
            pattern=pattern if pattern is not None else self.pattern.relabel(perm),
            exact=None if self.exact is None else permute_exact(self.exact, perm),
            spectrum=self.spectrum if pattern is None else None,
            ssp=self.ssp if pattern is None else None,
        )


def verify_realization(
    r: Realization,
    config: Q2CertConfig,
    *,
    distinct: int | None = 2,
    require_ssp: bool = True,
) -> Realization:
    """Run pattern, eigenvalue-count and SSP checks; raise on any failure.

    Returns the realization with its spectrum and SSP reports attached.
    """
    a = r.best()
    report = pattern_check(a, r.pattern, floor=config.pattern_floor, ceiling=config.zero_ceiling)
    if not report.ok:
        raise ConstructionError(
            "pattern_violation",
            {"construction": str(r.construction), "entry": report.violation, "reason": report.reason},
        )
    spectrum = distinct_eigenvalues(a, cluster_tol=config.cluster_tol)
    if spectrum.ambiguous or (distinct is not None and spectrum.distinct_count != distinct):
        raise ConstructionError(
            "eigenvalue_count_mismatch",
            {
                "construction": str(r.construction),
                "expected": distinct,
                "found": spectrum.distinct_count,
                "ambiguous": spectrum.ambiguous,
            },
        )
    ssp = None
    if require_ssp:
        ssp = ssp_check(a, r.pattern, tol_rank=config.tol_rank)
        if not ssp.has_ssp:
            raise ConstructionError(
                "ssp_failure",
                {
                    "construction": str(r.construction),
                    "verdict": str(ssp.verdict),
                    "kernel_dimension": ssp.kernel_dimension,
                    "singular_ratio": ssp.singular_ratio,
                },
            )
    _LOGGER.debug(
        "Verified %s realization of %s: q=%d", r.construction, r.pattern, spectrum.distinct_count
    )
    return replace(r, spectrum=spectrum, ssp=ssp)

