import sys

import pytest

from coamoeba_lab.laurent import VarietySpec, parse_polynomial


@pytest.fixture
def triangle_spec():
    return VarietySpec.hypersurface(parse_polynomial("1 + x1 + x2", 2))


@pytest.fixture
def real_line_spec():
    return VarietySpec.line([parse_polynomial("x1 + x2 + 1", 3),
                             parse_polynomial("x1 + x3 + 2", 3)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
