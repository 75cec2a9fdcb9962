import math

import numpy as np
import pytest
from hypothesis import settings

from pollrout.model import Instance, Node, PrpParameters, Route

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def line_instance(xs, windows, services=None, demands=None, params=PrpParameters(), depot_window=(0.0, 36000.0)):
    """Customers on the x axis; handy for hand-checkable schedules."""
    k = len(xs)
    services = services or [0.0] * k
    demands = demands or [100.0] * k
    nodes = [Node(0, 0.0, 0.0, 0.0, depot_window[0], depot_window[1], 0.0)]
    for i, (x, (a, b)) in enumerate(zip(xs, windows), start=1):
        nodes.append(Node(i, float(x), 0.0, demands[i - 1], a, b, services[i - 1]))
    return Instance("line", tuple(nodes), params)


@pytest.fixture
def params():
    return PrpParameters()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny():
    """Two customers 10 km and 20 km east of the depot, loose windows."""
    return line_instance([10_000, 20_000], [(0, math.inf), (0, math.inf)])


@pytest.fixture
def tiny_route():
    return Route.of([1, 2])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
