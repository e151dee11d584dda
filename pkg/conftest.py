"""Shared pytest fixtures: fresh settings per test and a seeded generator."""

import numpy as np
import pytest

from supergrass.utils.config import get_settings, reset_settings


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from the defaults, without .env or CLI overrides leaking in"""
    for name in (
        "SUPERGRASS_MAX_CELLS",
        "SUPERGRASS_PARALLEL",
        "SUPERGRASS_WORKERS",
        "SUPERGRASS_SEED",
        "SUPERGRASS_TRIALS",
        "SUPERGRASS_CHECK_PRIMES",
        "SUPERGRASS_ORACLE_MAX_VARS",
        "SUPERGRASS_ORACLE_MAX_DEGREE",
    ):
        monkeypatch.delenv(name, raising=False)
    reset_settings()
    yield get_settings()
    reset_settings()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
