"""Shared test configuration.

The acceptance tests in test_acceptance.py are named test_criterion_XX;
a terminal-summary hook prints one PASS/FAIL line per criterion at the
end of the run so the gate can be read off directly.
"""

import numpy as np
import pytest


@pytest.fixture
def rng():
    """Fresh deterministic generator, independent of test order."""
    return np.random.default_rng(20260818)


def _criterion_lines(terminalreporter):
    lines = {}
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            tag = nodeid.split("::test_criterion_", 1)[1]
            number = int(tag.split("_", 1)[0])
            # a test can appear once per phase; a failure in any phase fails it
            if lines.get(number) != "FAIL":
                lines[number] = label
    return lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = _criterion_lines(terminalreporter)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(f"CRITERION {number}: {lines[number]}")
