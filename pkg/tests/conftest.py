import numpy as np
import pytest

from lpfio import GridFunction, GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_function(spec: GridSpec, seed: int = 0) -> GridFunction:
    r = np.random.default_rng(seed)
    return GridFunction(spec, r.standard_normal(spec.shape) + 1j * r.standard_normal(spec.shape))


ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, passed: bool, detail: str) -> bool:
    line = f"{'PASS' if passed else 'FAIL'} criterion {criterion:2d}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
