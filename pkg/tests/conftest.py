import numpy as np
import pytest

from mimo_alloc.geometry import SystemConfig, draw_snapshot, substream
from mimo_alloc.harness import DEFAULT_SEED, ExperimentSpec, snapshot_for
from mimo_alloc.spectral import EnergyBudget, rate_coefficients

_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Collects one PASS/FAIL line per acceptance criterion."""

    def _report(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_config():
    return SystemConfig()


@pytest.fixture(scope="session")
def default_snapshot():
    return snapshot_for(ExperimentSpec("fig1", seed=DEFAULT_SEED))


@pytest.fixture(scope="session")
def default_coeffs(default_snapshot):
    return rate_coefficients(default_snapshot, 100)


def random_cases(count, seed=1234, config=None, snr_range=(-30.0, 20.0), N=100):
    """(coeffs, P) pairs from independent snapshots at random SNR."""
    config = config or SystemConfig()
    rng = np.random.default_rng(seed)
    cases = []
    for j in range(count):
        snap = draw_snapshot(config, substream(seed, j))
        snr_db = rng.uniform(*snr_range)
        cases.append((rate_coefficients(snap, N), EnergyBudget.from_snr_db(snr_db, config.T).P))
    return cases
