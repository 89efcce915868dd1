import pytest

_RESULTS = {}


class AcceptanceRecorder:
    def record(self, criterion, passed, detail):
        _RESULTS[criterion] = (bool(passed), detail)
        return passed


@pytest.fixture
def acceptance():
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_RESULTS, key=lambda c: (int("".join(ch for ch in c if ch.isdigit())), c)):
        passed, detail = _RESULTS[criterion]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  [{criterion}] {detail}")
