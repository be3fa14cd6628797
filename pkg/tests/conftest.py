import numpy as np
import pytest

from delaywave.grid import make_grid
from delaywave.params import make_params


def zero(x):
    return np.zeros_like(np.asarray(x, float))


def const(c):
    return lambda x: np.full_like(np.asarray(x, float), c)


@pytest.fixture
def params():
    return make_params(1.0, 0.5, 1.0, L=1.0, xi=1.0)


@pytest.fixture
def small_grid():
    return make_grid(1.0, 20, 8)


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def verdict():
    """Record a one-line pass/fail verdict for an acceptance criterion."""

    def _record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
