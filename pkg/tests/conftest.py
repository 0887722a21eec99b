import pytest
from hypothesis import HealthCheck, settings

from iacopt.catalog import generate_catalog

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SAMPLE_DOML = """\
optimization opt {
  objectives {
    "cost" => min
    "availability" => max
    "performance" => max
  }
  nonfunctional_requirements {
    req1 "Cost <= 100.0" max 100.0 => "cost";
    req2 "Availability >= 98.0%" min 98.0 => "availability";
    req3 "Region" values "00EU" => "region";
    req4 "elements" => "Storage, DB, VM, VM, VM";
  }
}
"""


@pytest.fixture(scope="session")
def catalog():
    return generate_catalog(42)


@pytest.fixture
def sample_doml():
    return SAMPLE_DOML


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, passed: bool, detail: str) -> bool:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
