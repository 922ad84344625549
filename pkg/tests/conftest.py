import pytest

from eeibma.traffic import TrafficConfig, build_dataset, generate_trace, split_dataset

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def reference_split():
    ds = build_dataset(generate_trace(TrafficConfig()), 8)
    return split_dataset(ds, 0.8, seed=(7, 3))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
