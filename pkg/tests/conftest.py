import numpy as np
import pytest

from prismunfold import build_band, load_fixture
from prismunfold.instances import FIXTURES


@pytest.fixture(scope="session")
def pc():
    return load_fixture("pc")


@pytest.fixture(scope="session")
def pcyc():
    return load_fixture("pcyc")


@pytest.fixture(scope="session")
def fixtures():
    return {name: load_fixture(name) for name in FIXTURES}


@pytest.fixture(scope="session")
def bands(fixtures):
    return {name: build_band(p) for name, p in fixtures.items()}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
