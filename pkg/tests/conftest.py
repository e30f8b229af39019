import numpy as np
import pytest

from parcorr import Dataset

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion for the summary."""

    def record(name: str, passed: bool, detail: str = ""):
        _CRITERIA.append(f"[{'PASS' if passed else 'FAIL'}] {name}" + (f" -- {detail}" if detail else ""))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_dataset(rng, n=6, t_len=40, dims=(1, 1, 2)):
    p, q, r = dims
    return Dataset.from_arrays(
        [rng.standard_normal((t_len, p)) for _ in range(n)],
        [rng.standard_normal((t_len, q)) for _ in range(n)],
        [rng.standard_normal((t_len, r)) for _ in range(n)],
    )
