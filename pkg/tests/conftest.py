import math

import pytest

from dsmlab import MediumParams, SpatialGrid
from dsmlab.core import MM, mhz_x2pi

GAMMA = mhz_x2pi(5.2)


def rabi_medium(**kw):
    args = dict(gamma_e=GAMMA, gamma_d=1e-3 * GAMMA, delta_p=4.6 * GAMMA, optical_depth=800.0,
                length=8 * MM, omega_c=1.5 * GAMMA)
    args.update(kw)
    return MediumParams(**args)


@pytest.fixture
def medium():
    return rabi_medium()


@pytest.fixture
def grid():
    return SpatialGrid.spanning(8 * MM, 1024)


def rel(a, b):
    return abs(a - b) / abs(b)


__all__ = ["GAMMA", "rabi_medium", "rel", "math"]


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
