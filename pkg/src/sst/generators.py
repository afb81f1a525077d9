"""Seeded synthetic temporal graphs."""

from __future__ import annotations

import numpy as np

from .graph import InvalidArgument
from .io import TemporalEdgeStream


def barabasi_albert_stream(n: int, m: int, seed: int = 0) -> TemporalEdgeStream:
    """Preferential-attachment growth as a directed interaction stream.

    Nodes ``0..m-1`` start isolated; node ``t >= m`` arrives at timestamp ``t``
    and points to ``m`` distinct existing nodes drawn with probability
    proportional to degree (the first arrival takes all ``m`` seeds).
    """
    if not (isinstance(n, int) and isinstance(m, int)) or m < 1 or n <= m:
        raise InvalidArgument(f"need n > m >= 1, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    # each node appears once per unit of degree
    pool: list[int] = []
    edges = []
    for t in range(m, n):
        if t == m:
            targets = list(range(m))
        else:
            chosen: set[int] = set()
            while len(chosen) < m:
                chosen.add(pool[int(rng.integers(len(pool)))])
            targets = sorted(chosen)
        for x in targets:
            edges.append((t, x, float(t)))
            pool.extend((t, x))
    return TemporalEdgeStream(edges, directed=True)


def uniform_attachment_stream(n: int, m: int, seed: int = 0) -> TemporalEdgeStream:
    """Null model for tests: arrivals attach to uniformly chosen existing nodes."""
    if m < 1 or n <= m:
        raise InvalidArgument(f"need n > m >= 1, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    edges = []
    for t in range(m, n):
        targets = range(m) if t == m else sorted(rng.choice(t, size=m, replace=False).tolist())
        edges.extend((t, int(x), float(t)) for x in targets)
    return TemporalEdgeStream(edges, directed=True)
