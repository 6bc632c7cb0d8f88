import pytest

from heunkernels.heun_ops import CheParams, HeunParams

LAMBDA = 0.37 + 0.11j


@pytest.fixture(scope="session")
def hp():
    """A generic complex Heun parameter set used across modules."""
    return HeunParams(3 + 0.7j, 0.4 - 0.2j, 0.31 + 0.1j, 0.77, 0.58 - 0.1j, 0.44)


@pytest.fixture(scope="session")
def cp():
    return CheParams(0, 0.8 + 0.3j, 0.31 + 0.1j, 0.58 - 0.1j, 0.44)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
