import sys

import pytest

from compactlin import zoo


@pytest.fixture
def example_a():
    return zoo.example_a()


@pytest.fixture
def example_b():
    return zoo.example_b()


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
