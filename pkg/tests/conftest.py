import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def sieve(limit: int) -> np.ndarray:
    """Boolean primality table for 0..limit (Eratosthenes)."""
    table = np.ones(limit + 1, dtype=bool)
    table[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if table[p]:
            table[p * p :: p] = False
    return table


@pytest.fixture(scope="session")
def prime_table():
    return sieve(10_000)


# acceptance criteria: one PASS/FAIL line each in the terminal summary
_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.fixture
def detail(request):
    """Attach a one-line measurement summary to the running acceptance test."""
    marker = request.node.get_closest_marker("acceptance")

    def _set(text: str):
        _ACCEPTANCE.setdefault(marker.args[0], {})["detail"] = text

    return _set


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    entry = _ACCEPTANCE.setdefault(marker.args[0], {})
    entry["title"] = marker.args[1]
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        entry["status"] = "PASS" if rep.passed else "FAIL"
        entry["seconds"] = rep.duration


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[num]
        line = f"[{e.get('status', 'NOT RUN')}] {num:>2}. {e.get('title', '')} ({e.get('seconds', 0):.1f}s)"
        if e.get("detail"):
            line += f" :: {e['detail']}"
        terminalreporter.write_line(line)
