import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from zetapair.zeta_zeros import compute_zeros  # noqa: E402


@pytest.fixture(scope="session")
def zeros_to_1000():
    return compute_zeros(10.0, 1000.0)


@pytest.fixture(scope="session")
def zeros_2500_5000():
    return compute_zeros(2500.0, 5000.0)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("ZETAPAIR_CACHE_DIR", str(tmp_path / "cache"))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
