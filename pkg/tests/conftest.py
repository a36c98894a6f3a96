import numpy as np
import pytest

from osom.core import ContextDistSpec, ContextKind, InstanceSpec, ModelKind
from osom.envelopes import EnvelopeParams


def make_params(delta_prime=0.1, sigma=1.0, K=2, d=2, n=100, rho_min=0.5, rho_max=0.5):
    return EnvelopeParams(delta_prime, sigma, K, d, n, rho_min, rho_max)


def sphere_instance(biases, theta=None, sigma=1.0, d=None):
    biases = np.asarray(biases, dtype=float)
    if theta is None:
        theta = np.zeros(d)
        kind = ModelKind.SIMPLE
    else:
        theta = np.asarray(theta, dtype=float)
        kind = ModelKind.COMPLEX
    dist = ContextDistSpec.default(ContextKind.UNIT_SPHERE, len(theta))
    return InstanceSpec(kind, biases, theta, sigma, dist)


@pytest.fixture
def params():
    return make_params()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_criteria = []


def record_criterion(number, title, ok, detail):
    """Log one acceptance line; the terminal summary repeats them all."""
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    _criteria.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_criteria):
            terminalreporter.write_line(line)
