import numpy as np
import pytest

from fitted_rk.basis import GridSpec, build_basis
from fitted_rk.kernel import synthesize_kernel_at

# acceptance lines collected by test_acceptance, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def basis11():
    return build_basis(GridSpec.uniform(11))


@pytest.fixture(scope="session")
def basis51():
    return build_basis(GridSpec.uniform(51))


@pytest.fixture(scope="session")
def slices():
    rng = np.random.default_rng(20240611)
    pts = np.concatenate([[0.0, 1.0], rng.uniform(0.0, 1.0, 18)])
    return [synthesize_kernel_at(float(s)) for s in pts]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
