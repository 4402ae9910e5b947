import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st
from hypothesis.extra.numpy import arrays

from plab import algebra as alg

settings.register_profile(
    "plab",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("plab")

SHIPPED = ["so3", "sl2", "aff1", "aff1_x_aff1", "heisenberg3", "borel_sl2"]

finite = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


def vectors(n, elements=finite):
    return arrays(np.float64, (n,), elements=elements)


def antisym(n, elements=finite):
    return arrays(np.float64, (n, n), elements=elements).map(lambda m: m - m.T)


@pytest.fixture(params=SHIPPED)
def shipped(request):
    return alg.CATALOG[request.param]()


@pytest.fixture
def so3():
    return alg.so3()


@pytest.fixture
def sl2():
    return alg.sl2()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# acceptance summary: one line per criterion, printed after the run
_CRITERIA = {}


@pytest.fixture
def criterion(request):
    def record(number, title, passed, detail=""):
        prev = _CRITERIA.get(number)
        ok = passed and (prev is None or prev[1])
        parts = [d for d in ((prev[2] if prev else ""), detail) if d]
        _CRITERIA[number] = (title, ok, "; ".join(parts))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
