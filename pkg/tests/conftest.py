import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

os.environ.setdefault("ROUGHDENS_WORKERS", "1")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion; printed after the run."""

    def record(number: int, title: str, passed: bool, detail: str):
        _ACCEPTANCE_LINES.append((number, f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
