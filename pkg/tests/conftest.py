import pytest

from vocbench import ScoredDataset

ACCEPTANCE_RESULTS = {}


@pytest.fixture
def d1():
    # (0.9 ok), (0.8 ok), (0.7 wrong), (0.6 ok), (0.5 wrong)
    return ScoredDataset.from_arrays(
        [0.9, 0.8, 0.7, 0.6, 0.5],
        [1, 2, 1, 3, 2],
        [1, 2, 2, 3, 1],
    )


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        name, ok = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key:>2}. {name}")
