# tests/conftest.py
from __future__ import annotations

from unittest.mock import patch

import pytest

from q2cert.config import Q2CertConfig
from q2cert.optimize import SearchResult


@pytest.fixture
def config() -> Q2CertConfig:
    return Q2CertConfig(restarts=40)


@pytest.fixture
def no_search():
    """Make every generic search fail so only structured routes can succeed."""
    failed = SearchResult(False, None, 0, float("inf"), ("disabled_in_test",))
    with (
        patch("q2cert.pipeline.generic_q2_search", return_value=failed),
        patch("q2cert.pipeline.three_eigenvalue_search", return_value=failed),
    ):
        yield
