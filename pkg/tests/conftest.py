import numpy as np
import pytest
from hypothesis import settings

from qtc.pauli import SeedTransform, random_symplectic
from qtc.registry import Registry

settings.register_profile("qtc", deadline=None, max_examples=60)
settings.load_profile("qtc")


@pytest.fixture(scope="session")
def registry():
    return Registry()


@pytest.fixture(scope="session")
def opt_inner(registry):
    return registry.get("opt-inner")


@pytest.fixture(scope="session")
def opt_outer(registry):
    return registry.get("opt-outer")


def toy_seed(kind: str, index: int = 0) -> SeedTransform:
    """Random [2,1,1] seed transform; ``kind`` is 'a' or 'e' for its single ancilla."""
    rng = np.random.default_rng([11, index])
    return SeedTransform(2, 1, 1, random_symplectic(3, rng), kind)


@pytest.fixture(params=["a", "e"], ids=["unassisted", "ebit"])
def toy(request):
    return toy_seed(request.param)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
