import numpy as np
import pytest

from serelay.channel import SystemConfig, sample_channels, trial_rng
from serelay.harness import paper_fixture_channels


ACCEPTANCE_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: full-scale acceptance criteria")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20180)


@pytest.fixture
def cfg():
    return SystemConfig()


@pytest.fixture
def fixture_channels():
    return paper_fixture_channels()


def draws(cfg, count, seed=7):
    """Deterministic channel draws shared by several test modules."""
    return [sample_channels(cfg, trial_rng(seed, k)) for k in range(count)]


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
