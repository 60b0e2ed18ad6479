import random

import pytest
from hypothesis import strategies as st

from hypotrees.construction import build
from hypotrees.core.tree import ColoredTree


@pytest.fixture(scope="session")
def states():
    """States 0..3 of the construction (about two seconds)."""
    return build(3)


@pytest.fixture(scope="session")
def state4(states):
    from hypotrees.construction import step

    return step(states[3])


def tree_from_parents(parents: list[int], root: int | None = 0) -> ColoredTree:
    """Vertex ``i + 1`` hangs off ``parents[i]`` (which must be at most ``i``)."""
    n = len(parents) + 1
    return ColoredTree.from_edges(range(n), [(p, i + 1) for i, p in enumerate(parents)], root=root)


@st.composite
def trees(draw, min_size=1, max_size=12, max_degree=None):
    """Random rooted trees; with ``max_degree`` every vertex has at most that many neighbours."""
    n = draw(st.integers(min_size, max_size))
    parents = []
    degree = [0] * n
    for v in range(1, n):
        choices = [u for u in range(v) if max_degree is None or degree[u] < max_degree]
        p = draw(st.sampled_from(choices)) if choices else 0
        parents.append(p)
        degree[p] += 1
        degree[v] += 1
    return tree_from_parents(parents)


def random_tree(rng: random.Random, n: int, max_degree: int | None = None) -> ColoredTree:
    degree = [0] * n
    edges = []
    for v in range(1, n):
        choices = [u for u in range(v) if max_degree is None or degree[u] < max_degree]
        p = rng.choice(choices)
        edges.append((p, v))
        degree[p] += 1
        degree[v] += 1
    return ColoredTree.from_edges(range(n), edges, root=0)


# -- acceptance reporting --------------------------------------------------------

_criteria: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number, title = mark.args
    ok = _criteria.get(number, (title, True))[1] and rep.passed
    _criteria[number] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
