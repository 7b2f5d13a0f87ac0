import random

import pytest
from typer.testing import CliRunner

from hecke_moments.config import get_settings
from hecke_moments.gint import GInt, gaussian_primes


@pytest.fixture
def rng():
    """Seeded random source for property checks"""
    return random.Random(get_settings().seed)


@pytest.fixture
def small_primes():
    """Primary odd primes with norm up to 200"""
    return list(gaussian_primes(200).elements())


@pytest.fixture
def sample_moduli():
    """Odd moduli with split, inert and composite factorisations"""
    return [GInt(-1, 2), GInt(-3, 0), GInt(3, 2), GInt(-1, 2) * GInt(-3, 0), GInt(5, 4) * GInt(-1, -2)]


@pytest.fixture
def runner():
    """Typer CLI runner"""
    return CliRunner()


@pytest.fixture
def fast_settings(monkeypatch):
    """Settings with a short Euler truncation so constants stay cheap"""
    monkeypatch.setenv("HECKE_EULER_TRUNCATION", "2000")
    get_settings.cache_clear()
    yield get_settings()
    get_settings.cache_clear()
