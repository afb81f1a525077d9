import itertools
import os
import random

import pytest
from hypothesis import settings, strategies as st

from sst.graph import Graph

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_graph(rng: random.Random, n: int, p: float, directed: bool) -> Graph:
    g = Graph(directed, range(n))
    for u, v in itertools.permutations(range(n), 2) if directed else itertools.combinations(range(n), 2):
        if rng.random() < p:
            g.add_edge(u, v)
    return g


@st.composite
def graphs(draw, min_nodes=1, max_nodes=8, directed=None):
    n = draw(st.integers(min_nodes, max_nodes))
    d = draw(st.booleans()) if directed is None else directed
    pairs = list(itertools.permutations(range(n), 2) if d else itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    g = Graph(d, range(n))
    for (u, v), keep in zip(pairs, mask):
        if keep:
            g.add_edge(u, v)
    return g


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_line(request):
    """Records one PASS/FAIL line per acceptance criterion."""

    def record(name: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else "")
        request.config._acceptance_lines.append(line)
        print(line)

    return record
