import numpy as np
import pytest

from ozfcheck.plants import delayed_third_order, double_resonance, lightly_damped_pair
from ozfcheck.xferfn import DelayedRational, ShiftedPlant


@pytest.fixture(scope="session")
def resonant():
    return lightly_damped_pair()


@pytest.fixture(scope="session")
def double_res():
    return double_resonance(0.25)


@pytest.fixture(scope="session")
def delayed():
    return delayed_third_order()


@pytest.fixture
def unity():
    return ShiftedPlant(DelayedRational([1.0], [1.0]))


def poly_at(coeffs, s):
    """Plain power-sum polynomial evaluation, independent of Horner."""
    n = len(coeffs) - 1
    return sum(c * s ** (n - i) for i, c in enumerate(coeffs))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._criteria = {}




def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    item.config._criteria[number] = (ok, title, call.duration)


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_criteria", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, title, duration = results[number]
        terminalreporter.write_line(
            f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({duration:.2f} s)")
