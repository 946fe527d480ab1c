from pathlib import Path

import numpy as np
import pytest

from eigengesture.imageio import DatasetManifest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def worked_corpus():
    """Two 3-pixel images; mean (2, 1, 1), single component (1, 1, 0)/sqrt(2)."""
    return DatasetManifest.from_vectors(["a", "b"], [[1.0, 0.0, 1.0], [3.0, 2.0, 1.0]])


def random_symmetric(rng, n):
    x = rng.uniform(-1.0, 1.0, (n, n))
    return np.triu(x) + np.triu(x, 1).T


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
