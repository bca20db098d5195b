import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import xxz_fixture  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def record(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def xxz_table(tmp_path_factory):
    path = tmp_path_factory.mktemp("xxz") / "xxz_r1.csv"
    xxz_fixture.write_table(path)
    return path
