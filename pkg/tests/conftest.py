import numpy as np
import pytest

from mpoxnet import preset
from mpoxnet.simulation import run_simulation

ACCEPTANCE = {}


def record_criterion(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_cfg():
    return preset("targeted", n_nodes=3000, horizon=120, seed=7)


@pytest.fixture(scope="session")
def small_run(small_cfg):
    return run_simulation(small_cfg.replace(record_edges=True), 0)
