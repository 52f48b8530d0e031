import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from trak import read_track
from trak.generate import random_track
from trak.symbolic import build_subshift

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "trak" / "fixtures"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def fixture(name: str):
    return read_track(FIXTURES / name)


def corpus():
    return [read_track(p) for p in sorted((FIXTURES / "corpus").glob("*.trk"))]


def track_from_seed(seed: int, n_switches: int = 6):
    return random_track(random.Random(seed), n_switches)


@pytest.fixture(scope="session")
def sphere5():
    return fixture("sphere5.trk")


@pytest.fixture(scope="session")
def sphere5_subshift(sphere5):
    return build_subshift([sphere5], numbered=False)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    """Store an acceptance result for the end-of-run summary and fail the test if needed."""
    ACCEPTANCE[criterion] = (bool(ok), detail)
    assert ok, f"criterion {criterion}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
