import math

import numpy as np
import pytest

from quasiminimal.charts import ExprChart, Grid
from quasiminimal.families import (NonFlatSpec, bd_zero_surface, example_chart,
                                   nonflat_integrate)


@pytest.fixture(scope="session")
def example():
    return example_chart()


@pytest.fixture(scope="session")
def theta_uv():
    return bd_zero_surface("u*v")


@pytest.fixture(scope="session")
def theta_exp():
    return bd_zero_surface("exp(u+v)")


@pytest.fixture(scope="session")
def nonflat():
    return nonflat_integrate(NonFlatSpec())


@pytest.fixture(scope="session")
def builtin_charts(example, theta_uv, theta_exp, nonflat):
    return {"example": example, "theta_uv": theta_uv, "theta_exp": theta_exp,
            "nonflat": nonflat}


@pytest.fixture
def spacelike_graph():
    """Graph over the spacelike (x1, x2) plane; not a Lorentz chart."""
    return ExprChart(["u", "v", "u*v/4", "u^2/8"], ((0, 1), (0, 1)))


@pytest.fixture
def anti_de_sitter():
    """Totally umbilic Lorentz surface in null coordinates with timelike H."""
    return ExprChart(["sin((u-v)/2)/cos((u-v)/2)", "0",
                      "cos((u+v)/2)/cos((u-v)/2)", "sin((u+v)/2)/cos((u-v)/2)"],
                     ((0, 1), (0, 1)))


def grid_points(chart, n=5, margin=0.0):
    return chart.sample_points(Grid(n, n, margin))


def example_n1(t):
    t = np.asarray(t, dtype=float)
    return np.stack([np.cos(t), np.sin(t), np.sin(t), np.cos(t)])


SQRT2 = math.sqrt(2.0)


_ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Log a pass/fail line for an acceptance criterion and assert it."""

    def _record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
