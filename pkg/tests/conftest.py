import numpy as np
import pytest

from kuramoto_moments.measures import (GaussianFrequency, MeasureSpec, UniformFrequency,
                                       WrappedGaussianPhase)
from kuramoto_moments.orthopoly import recurrence_coefficients

ACCEPTANCE_LINES = []


def record_acceptance(criterion: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def gaussian():
    return GaussianFrequency(0.0, 1.0)


@pytest.fixture(scope="session")
def uniform():
    return UniformFrequency(-1.0, 1.0)


@pytest.fixture(scope="session")
def headline_spec():
    return MeasureSpec(WrappedGaussianPhase(0.0, 1.0), GaussianFrequency(0.0, 1.0))


@pytest.fixture(scope="session")
def hermite_coeffs(gaussian):
    return recurrence_coefficients(gaussian, 20)
