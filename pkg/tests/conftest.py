import math

import numpy as np
import pytest

from optsample.signals import FrequencyBasis, Multisine
from optsample.systems import RationalTransferFunction

SEC5_OMEGAS = (3 * math.sqrt(2), 3 * math.pi, 12.0, 12.3)

ACCEPTANCE_LINES = []


@pytest.fixture
def sec5_input():
    return Multisine.from_arrays(1.0, SEC5_OMEGAS)


@pytest.fixture
def sec5_basis():
    return FrequencyBasis.from_omegas(SEC5_OMEGAS)


@pytest.fixture
def sec5_plant():
    return RationalTransferFunction([2.0], [1.0, 2.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
