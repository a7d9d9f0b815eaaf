import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def random_state(n, rng):
    from plateaunet.statevector import StateVector

    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return StateVector(v / np.linalg.norm(v), n)


def max_rel_error(a, b) -> float:
    """Largest componentwise deviation relative to the gradient's scale.

    Normalising each component by its own size blows up finite-difference
    noise on near-zero entries, so the scale is the larger infinity norm.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    return float(np.max(np.abs(a - b)) / scale) if scale > 0 else 0.0


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
