import numpy as np
import pytest

from graphcd import Graph, VertexFunction, parse_graph


def random_graph(rng, max_vertices=8, min_vertices=2):
    """Random simple graph without isolated vertices (not necessarily connected)."""
    n = int(rng.integers(min_vertices, max_vertices + 1))
    names = [f"v{i}" for i in range(n)]
    p = rng.uniform(0.2, 0.8)
    edges = {(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p}
    for i in range(n):
        if not any(i in e for e in edges):
            j = int(rng.choice([k for k in range(n) if k != i]))
            edges.add((min(i, j), max(i, j)))
    return Graph((names[i], names[j]) for i, j in edges)


def random_function(rng, g, positive=False, scale=3.0):
    if positive:
        vals = np.exp(rng.uniform(-scale, scale, len(g)))
    else:
        vals = rng.normal(0, scale, len(g))
    return VertexFunction.on(g, vals)


def admissible(rng, g, x, tries=1000):
    """Positive function with Delta f(x) < 0, or None."""
    mu = g.mu(x)
    for _ in range(tries):
        f = random_function(rng, g, positive=True, scale=2.0)
        if mu * sum(f[y] - f[x] for y in g.neighbors(x)) < 0:
            return f
    return None


@pytest.fixture
def rng():
    return np.random.default_rng(20150101)


@pytest.fixture
def eg():
    return parse_graph("x y\ny z")


@pytest.fixture
def edge():
    return parse_graph("a b")


@pytest.fixture
def fn(eg):
    def make(*values):
        return VertexFunction.on(eg, values)
    return make


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
