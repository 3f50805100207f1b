import pytest

from helpers import table1_group

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def table1():
    return table1_group()


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
