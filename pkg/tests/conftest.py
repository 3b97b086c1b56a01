import numpy as np
import pytest

from hpcwater.ingestion import load_default_parameter_db
from hpcwater.operational import SourceFactors

T0 = np.datetime64("2023-01-01T00:00:00", "s")
HOUR = np.timedelta64(3600, "s")


@pytest.fixture(scope="session")
def default_db():
    return load_default_parameter_db()


@pytest.fixture
def factors():
    return {
        "coal": SourceFactors("coal", 1.0, 820.0),
        "gas": SourceFactors("gas", 1.2, 490.0),
        "nuclear": SourceFactors("nuclear", 2.7, 12.0, cooling="wet_tower"),
        "hydro": SourceFactors("hydro", 17.0, 24.0),
        "wind": SourceFactors("wind", 1.0, 11.0),
        "a": SourceFactors("a", 4.0, 100.0),
        "b": SourceFactors("b", 2.0, 300.0),
    }


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, verdict = results[number]
        terminalreporter.write_line(f"[{verdict}] criterion {number:2d}: {title}")
