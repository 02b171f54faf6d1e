import pytest

_LINES: list[tuple[str, bool, str]] = []


class Verdicts:
    """Collects one PASS/FAIL line per acceptance criterion."""

    def record(self, criterion: str, passed: bool, detail: str) -> bool:
        _LINES.append((criterion, bool(passed), detail))
        return bool(passed)


@pytest.fixture(scope="session")
def verdicts():
    return Verdicts()


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _LINES:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
