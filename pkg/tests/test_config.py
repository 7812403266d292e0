from __future__ import annotations

import pytest

from q2cert.config import Q2CertConfig
from q2cert.const import TOL_RESIDUAL
from q2cert.errors import HypothesisError


def test_defaults() -> None:
    config = Q2CertConfig.load(environ={})
    assert config == Q2CertConfig()
    assert config.tol_residual == TOL_RESIDUAL
    assert not config.exact_only


def test_environment_then_overrides() -> None:
    environ = {"Q2CERT_SEED": "7", "Q2CERT_EXACT_ONLY": "yes", "Q2CERT_LOG_LEVEL": "debug"}
    config = Q2CertConfig.load({"seed": 11, "restarts": None}, environ=environ)
    assert config.seed == 11
    assert config.exact_only
    assert config.log_level == "DEBUG"


@pytest.mark.parametrize(
    ("data", "key"),
    [
        ({"tol_rank": 0}, "tol_rank"),
        ({"restarts": "many"}, "restarts"),
        ({"exact_only": "perhaps"}, "exact_only"),
        ({"colour": "blue"}, "colour"),
    ],
)
def test_invalid_values(data: dict[str, object], key: str) -> None:
    with pytest.raises(HypothesisError) as err:
        Q2CertConfig.from_mapping(data)
    assert err.value.code == "invalid_config"
    assert err.value.detail == key


def test_own_tolerances_are_not_looser() -> None:
    config = Q2CertConfig(tol_rank=1e-6)
    assert config.looser_tolerances(config.tolerances()) == []
    assert config.looser_tolerances({}) == []


@pytest.mark.parametrize(
    ("tolerances", "looser"),
    [
        ({"zero_ceiling": 1.0, "tol_rank": 1e-12}, ["tol_rank", "zero_ceiling"]),
        ({"cluster_tol": 1e-6, "pattern_floor": 1e-9}, ["cluster_tol", "pattern_floor"]),
        ({"tol_residual": 1e-12, "nonzero_floor": 1e-3, "tol_rank": 1e-6}, []),
    ],
)
def test_looser_tolerances(tolerances: dict[str, float], looser: list[str]) -> None:
    assert Q2CertConfig().looser_tolerances(tolerances) == looser


@pytest.mark.parametrize("tolerances", [{"tol_rank": -1.0}, {"zero_ceiling": "tiny"}, {"seed": 3}])
def test_looser_tolerances_rejects_bad_entries(tolerances: dict[str, object]) -> None:
    with pytest.raises(HypothesisError) as err:
        Q2CertConfig().looser_tolerances(tolerances)
    assert err.value.code == "invalid_tolerances"
