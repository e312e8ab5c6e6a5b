import pytest

ACCEPTANCE_RESULTS: list = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_RESULTS


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for r in sorted(ACCEPTANCE_RESULTS, key=lambda r: int(r.name.split()[1].rstrip(":"))):
        terminalreporter.write_line(r.line())
    n_ok = sum(r.passed for r in ACCEPTANCE_RESULTS)
    terminalreporter.write_line(f"{n_ok}/{len(ACCEPTANCE_RESULTS)} criteria passed")
