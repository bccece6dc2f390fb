import numpy as np
import pytest

from cotrend.critical_values import default_table


@pytest.fixture(scope="session")
def cv_table():
    return default_table()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _isolated_cache(monkeypatch, tmp_path):
    # keep every test away from a user-level critical value cache
    monkeypatch.delenv("COTREND_CACHE_DIR", raising=False)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
