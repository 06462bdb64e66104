import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from primegap.arith import build_prime_table  # noqa: E402


@pytest.fixture(scope="session")
def table():
    """Primes below 2 * 10**6 + 64, enough for every range used in the suite."""
    return build_prime_table(2 * 10**6 + 64)


@pytest.fixture(scope="session")
def small_table():
    return build_prime_table(10**4 + 16)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("PRIMEGAP_CACHE", str(tmp_path / "cache"))


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {note}")
