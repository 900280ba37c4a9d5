import warnings

import numpy as np
import pytest

from fanodho import BathSpectrum, ModelParams


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running numerical checks")


@pytest.fixture
def base_params():
    return ModelParams(mass=1.0, omega0=1.0, gamma=0.1, cutoff=50.0)


@pytest.fixture
def drude50():
    return BathSpectrum.drude(0.1, 50.0)


def params(gamma=0.1, cutoff=50.0, omega0=1.0, mass=1.0, kT=0.0):
    """ModelParams without the small-cutoff warning."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return ModelParams(mass=mass, omega0=omega0, gamma=gamma,
                           cutoff=cutoff if np.isfinite(cutoff) else np.inf, kT=kT)


_ACCEPTANCE = []


@pytest.fixture
def report():
    """Record one acceptance line; all lines are repeated in the terminal summary."""
    def _report(criterion, ok, detail):
        line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _ACCEPTANCE.append(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
