import pytest

RESULTS = {}


@pytest.fixture
def record(request):
    """Store a one-line acceptance verdict, printed in the terminal summary."""
    def _record(number, text, ok):
        RESULTS[number] = (text, ok)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        text, ok = RESULTS[number]
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {text}")
