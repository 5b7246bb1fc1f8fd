import pytest
from hypothesis import settings

from probcover.data import EmbeddingSet

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def line4():
    """Points 0, 1, 2, 10 on a line, labels A A A B."""
    return EmbeddingSet([[0.0], [1.0], [2.0], [10.0]], [0, 0, 0, 1])


@pytest.fixture
def acceptance_report():
    def report(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

