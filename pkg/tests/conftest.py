"""
StateNet-PH Test Suite
Shared fixtures
"""
import numpy as np
import pytest

from statenet.config import reset_config
from statenet.services.signals import TimeSeries, simulate_preset


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch):
    """Every test starts from config.yaml without environment overrides"""
    for name in ("STATENET_OUTPUT_DIR", "STATENET_JOBS", "STATENET_LOG_LEVEL",
                 "STATENET_HOMOLOGY_ENGINE", "STATENET_DIFFUSION_T"):
        monkeypatch.delenv(name, raising=False)
    reset_config()
    yield
    reset_config()


@pytest.fixture
def sine():
    """Two periods of sin(pi t) at 50 Hz plus one delay of 26 samples"""
    k = np.arange(226)
    return TimeSeries(np.sin(np.pi * k / 50.0), 50.0, "sine")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def rossler_periodic():
    return simulate_preset("rossler-periodic")


@pytest.fixture(scope="session")
def rossler_chaotic():
    return simulate_preset("rossler-chaotic")
