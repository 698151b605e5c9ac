import numpy as np
import pytest

from rsslocate.pathloss import PathLossParams, RssMeasurement, rss_mean


def noiseless_measurements(bs, positions, params):
    """RSS exactly on the mean path-loss curve at each position."""
    out = []
    for p in positions:
        d = float(np.hypot(p[0] - bs[0], p[1] - bs[1]))
        out.append(RssMeasurement((float(p[0]), float(p[1])), float(rss_mean(params, d))))
    return out


@pytest.fixture
def channel():
    return PathLossParams(r0=-27.0, n=3.0, sigma=3.0)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def _report(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
