import numpy as np
import pytest

from stackline.frame import LabeledSet

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def blobs():
    """Two Gaussian blobs, 3 features, means at -1 / +1."""
    rng = np.random.default_rng(7)
    n = 200
    y = np.repeat([0, 1], n // 2)
    X = rng.standard_normal((n, 3)) + np.where(y == 1, 1.0, -1.0)[:, None]
    return LabeledSet(X, y, ["a", "b", "c"])
