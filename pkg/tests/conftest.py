import sys

import numpy as np
import pytest

from annulus_rotation import build_boomerang_example, build_transverse_example


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def transverse():
    return build_transverse_example()


@pytest.fixture(scope="session")
def boomerang():
    return build_boomerang_example()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criteria (slow)")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
