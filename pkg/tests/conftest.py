import numpy as np
import pytest

from htlab.symbols import FourierSymbol


def random_symbol(rng: np.random.Generator, degree: int) -> FourierSymbol:
    """Real coefficients uniform in [-1, 1] on frequencies 1..degree."""
    return FourierSymbol.from_real(rng.uniform(-1.0, 1.0, degree), start=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
