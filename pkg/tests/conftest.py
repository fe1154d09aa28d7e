import pytest

from mdbusy.model import make_params

_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def unit_params():
    return make_params(1.0, 1.0)


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the summary."""

    def record(number: int, title: str, failures: list[str]) -> None:
        request.config.stash[_ACCEPTANCE][number] = (title, failures)

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, failures = results[number]
        status = "FAIL" if failures else "PASS"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
        for line in failures:
            terminalreporter.write_line(f"         {line}")
