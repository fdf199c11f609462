import numpy as np
import pytest

from fuzzysketch.minsum import ProductCode

_CRITERIA: list[tuple[bool, str, str]] = []


@pytest.fixture(scope="session")
def pc_full():
    return ProductCode.from_params(6, 5)


@pytest.fixture(scope="session")
def pc_16():
    return ProductCode.from_params(2, 2)


@pytest.fixture(scope="session")
def pc_32():
    return ProductCode.from_params(3, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion():
    """Record an acceptance criterion outcome and assert it."""

    def check(name: str, ok: bool, detail: str = "") -> None:
        _CRITERIA.append((bool(ok), name, detail))
        assert ok, f"{name}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for ok, name, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
