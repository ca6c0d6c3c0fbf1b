import sys

import mpmath
import pytest
from hypothesis import settings

from mdzv import fixtures as fx

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def QQ():
    return fx.field("Q")


@pytest.fixture(scope="session")
def K2():
    return fx.field("Q(sqrt2)")


@pytest.fixture(scope="session")
def K3():
    return fx.field("cubic")


@pytest.fixture(scope="session")
def cone_q():
    return fx.cone("Q")


@pytest.fixture(scope="session")
def cone_2():
    return fx.cone("Q(sqrt2)")


@pytest.fixture(scope="session")
def cone_3r():
    return fx.cone("cubic-real")


@pytest.fixture(autouse=True)
def high_precision():
    # comparisons against 128-bit results need more than the ambient 53 bits
    with mpmath.workprec(160):
        yield


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
