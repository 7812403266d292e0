"""Configuration for q2cert runs."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import asdict, dataclass, fields
import logging
import os
from typing import Any, Final

import voluptuous as vol

from .const import (
    CLUSTER_TOL,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    ENV_PREFIX,
    NONZERO_FLOOR,
    PATTERN_FLOOR,
    TOL_RANK,
    TOL_RESIDUAL,
    ZERO_CEILING,
)
from .errors import HypothesisError

_LOGGER = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _boolean(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise vol.Invalid(f"invalid boolean value {value!r}")


_POSITIVE_FLOAT = vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False))

CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional("seed", default=DEFAULT_SEED): vol.All(vol.Coerce(int), vol.Range(min=0)),
        vol.Optional("tol_residual", default=TOL_RESIDUAL): _POSITIVE_FLOAT,
        vol.Optional("tol_rank", default=TOL_RANK): _POSITIVE_FLOAT,
        vol.Optional("nonzero_floor", default=NONZERO_FLOOR): _POSITIVE_FLOAT,
        vol.Optional("pattern_floor", default=PATTERN_FLOOR): _POSITIVE_FLOAT,
        vol.Optional("zero_ceiling", default=ZERO_CEILING): _POSITIVE_FLOAT,
        vol.Optional("cluster_tol", default=CLUSTER_TOL): _POSITIVE_FLOAT,
        vol.Optional("restarts", default=DEFAULT_RESTARTS): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional("exact_only", default=False): _boolean,
        vol.Optional("jobs", default=1): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional("log_level", default="WARNING"): vol.All(
            vol.Upper, vol.In(LOG_LEVELS)
        ),
    },
    extra=vol.PREVENT_EXTRA,
)

# a larger ceiling or a smaller floor admits more matrices
_CEILINGS: Final = frozenset({"cluster_tol", "tol_residual", "zero_ceiling"})
_FLOORS: Final = frozenset({"nonzero_floor", "pattern_floor", "tol_rank"})

TOLERANCE_SCHEMA = vol.Schema(
    {vol.Optional(key): _POSITIVE_FLOAT for key in sorted(_CEILINGS | _FLOORS)},
    extra=vol.PREVENT_EXTRA,
)


@dataclass(frozen=True, slots=True)
class Q2CertConfig:
    """Validated run settings. Every certificate records its tolerances."""

    seed: int = DEFAULT_SEED
    tol_residual: float = TOL_RESIDUAL
    tol_rank: float = TOL_RANK
    nonzero_floor: float = NONZERO_FLOOR
    pattern_floor: float = PATTERN_FLOOR
    zero_ceiling: float = ZERO_CEILING
    cluster_tol: float = CLUSTER_TOL
    restarts: int = DEFAULT_RESTARTS
    exact_only: bool = False
    jobs: int = 1
    log_level: str = "WARNING"

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> Q2CertConfig:
        try:
            validated = CONFIG_SCHEMA(dict(data))
        except vol.Invalid as err:
            key = ".".join(str(p) for p in err.path) or "config"
            raise HypothesisError("invalid_config", key) from err
        return cls(**validated)

    @classmethod
    def load(
        cls,
        overrides: Mapping[str, Any] | None = None,
        environ: Mapping[str, str] | None = None,
    ) -> Q2CertConfig:
        """Merge defaults, ``Q2CERT_*`` environment variables and explicit overrides."""
        env = os.environ if environ is None else environ
        data: dict[str, Any] = {}
        for f in fields(cls):
            if (raw := env.get(f"{ENV_PREFIX}{f.name.upper()}")) is not None:
                data[f.name] = raw
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        config = cls.from_mapping(data)
        _LOGGER.debug("Loaded configuration %s", config)
        return config

    def tolerances(self) -> dict[str, float]:
        return {
            "cluster_tol": self.cluster_tol,
            "nonzero_floor": self.nonzero_floor,
            "pattern_floor": self.pattern_floor,
            "tol_rank": self.tol_rank,
            "tol_residual": self.tol_residual,
            "zero_ceiling": self.zero_ceiling,
        }

    def looser_tolerances(self, tolerances: Mapping[str, Any]) -> list[str]:
        """Names in ``tolerances`` that would accept more than this configuration does."""
        try:
            declared = TOLERANCE_SCHEMA(dict(tolerances))
        except vol.Invalid as err:
            key = ".".join(str(p) for p in err.path) or "tolerances"
            raise HypothesisError("invalid_tolerances", key) from err
        mine = self.tolerances()
        return sorted(
            key
            for key, value in declared.items()
            if (key in _CEILINGS and value > mine[key]) or (key in _FLOORS and value < mine[key])
        )

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)
