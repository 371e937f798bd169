import functools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mainproblem import elements as el
from mainproblem import oracle
from mainproblem.cli import CASES

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

DAY = 86400.0
ARC = np.arange(0.0, 30 * DAY + 1.0, 600.0)


def pytest_configure(config):
    # Reuse compiled correction kernels across test sessions.
    import jax

    cache = getattr(config, "cache", None)
    if cache is not None:
        jax.config.update("jax_compilation_cache_dir", str(cache.mkdir("jax")))
        jax.config.update("jax_persistent_cache_min_compile_time_secs", 1.0)


def initial_state(case: str, field=el.DEFAULT_FIELD) -> el.CartesianState:
    k = el.KeplerianElements.from_degrees(*CASES[case], kind=el.AnomalyKind.MEAN)
    return el.convert(k, "cartesian", field)


@functools.lru_cache(maxsize=None)
def reference(case: str) -> oracle.ReferenceTrajectory:
    """30-day reference trajectory sampled every 10 minutes, shared by all tests."""
    return oracle.integrate(initial_state(case), ARC)


@pytest.fixture(scope="session")
def references():
    return reference


#: One line per acceptance criterion, repeated in the terminal summary.
ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict(request):
    """Record and print the pass/fail line of an acceptance criterion."""

    def record(number: int, passed: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE.append(line)
        capture = request.config.pluginmanager.getplugin("capturemanager")
        with capture.global_and_fixture_disabled():
            print("\n" + line, flush=True)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
