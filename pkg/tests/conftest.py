import numpy as np
import pytest

from evcss.signals import SignalSpec, reference_cyclic_feature


@pytest.fixture(scope="session")
def spec():
    return SignalSpec()


@pytest.fixture(scope="session")
def feature(spec):
    return reference_cyclic_feature(spec, 160e3, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


ACCEPTANCE_LINES = []


def record_acceptance(number, passed, detail):
    line = f"ACCEPTANCE #{number:<2} {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("#")[1].split()[0])):
            terminalreporter.write_line(line)
