import numpy as np
import pytest

from dgmoduli import GF, QQ, Quiver, path_algebra


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def a2_f3():
    return path_algebra(Quiver.linear(2), GF(3))


@pytest.fixture
def a2_f2():
    return path_algebra(Quiver.linear(2), GF(2))


@pytest.fixture
def point_f2():
    return path_algebra(Quiver(["1"]), GF(2))


@pytest.fixture(params=[GF(2), GF(5), QQ], ids=["F2", "F5", "Q"])
def field(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
