"""Edge-list ingestion, temporal bucketing, static splits."""

from __future__ import annotations

import gzip
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .graph import Graph, InvalidArgument

log = logging.getLogger(__name__)

_SPLIT = re.compile(r"[,\s]+")


class ParseError(ValueError):
    pass


@dataclass
class TemporalEdgeStream:
    """Interactions ``(source, target, timestamp)`` sorted by timestamp."""

    edges: list[tuple[int, int, float]]
    directed: bool = True
    labels: dict[int, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.edges)

    def nodes(self) -> list[int]:
        return sorted({x for u, v, _ in self.edges for x in (u, v)})


@dataclass
class Bucket:
    index: int  # 1-based
    weights: dict[tuple[int, int], int]

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.weights)


@dataclass
class LoadStats:
    lines: int = 0
    self_loops: int = 0
    duplicates: int = 0


def _open(path) -> IO[str]:
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt")
    return open(path)


def _rows(handle: Iterable[str], min_fields: int, max_fields: int):
    for lineno, line in enumerate(handle, 1):
        line = line.strip()
        if not line or line[0] in "#%":
            continue
        parts = [p for p in _SPLIT.split(line) if p]
        if not min_fields <= len(parts) <= max_fields:
            raise ParseError(f"line {lineno}: expected {min_fields}-{max_fields} fields, got {len(parts)}")
        yield lineno, parts


class _Ids:
    def __init__(self):
        self.ids: dict[str, int] = {}

    def __call__(self, label: str) -> int:
        got = self.ids.get(label)
        if got is None:
            got = self.ids[label] = len(self.ids)
        return got

    def labels(self) -> dict[int, str]:
        return {i: lab for lab, i in self.ids.items()}


def load_static(path, directed: bool = False, stats: LoadStats | None = None) -> Graph:
    """Read ``src dst [extra...]`` lines into a simple graph with dense ids.

    Self-loops are dropped and duplicates merged; both are counted in ``stats``
    and logged.
    """
    stats = stats if stats is not None else LoadStats()
    ids = _Ids()
    g = Graph(directed)
    with _open(path) as fh:
        for lineno, parts in _rows(fh, 2, 4):
            stats.lines += 1
            u, v = ids(parts[0]), ids(parts[1])
            g.add_node(u)
            g.add_node(v)
            if u == v:
                stats.self_loops += 1
                continue
            if g.has_edge(u, v):
                stats.duplicates += 1
                continue
            g.add_edge(u, v)
    g.labels = ids.labels()
    if stats.self_loops or stats.duplicates:
        log.warning("%s: dropped %d self-loops, merged %d duplicate edges",
                    path, stats.self_loops, stats.duplicates)
    return g


def load_temporal(path_or_handle, directed: bool = True) -> TemporalEdgeStream:
    """Read ``src dst timestamp`` lines; stable-sorted by timestamp.

    Node ids are assigned in first-use order of the sorted stream.
    """
    if hasattr(path_or_handle, "read"):
        rows = list(_rows(path_or_handle, 2, 4))
    else:
        with _open(path_or_handle) as fh:
            rows = list(_rows(fh, 2, 4))
    raw = []
    for lineno, parts in rows:
        if len(parts) < 3:
            raise ParseError(f"line {lineno}: missing timestamp")
        try:
            ts = float(parts[2])
        except ValueError:
            raise ParseError(f"line {lineno}: bad timestamp {parts[2]!r}") from None
        raw.append((parts[0], parts[1], ts))
    raw.sort(key=lambda r: r[2])
    ids = _Ids()
    edges = [(ids(a), ids(b), ts) for a, b, ts in raw]
    return TemporalEdgeStream(edges, directed, ids.labels())


def _fmt_ts(ts: float) -> str:
    return str(int(ts)) if float(ts).is_integer() else repr(ts)


def write_static(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {'directed' if g.directed else 'undirected'} n={len(g)} m={g.number_of_edges()}\n")
        for u, v in g.edges():
            fh.write(f"{g.labels.get(u, u)} {g.labels.get(v, v)}\n")


def write_temporal(stream: TemporalEdgeStream, fh: IO[str]) -> None:
    for u, v, ts in stream.edges:
        fh.write(f"{stream.labels.get(u, u)} {stream.labels.get(v, v)} {_fmt_ts(ts)}\n")


def bucket_sizes(n: int, tau: int) -> list[int]:
    """Even split of ``n`` items; the first ``n % tau`` buckets take one extra."""
    base, extra = divmod(n, tau)
    return [base + (1 if i < extra else 0) for i in range(tau)]


def bucket_stream(stream: TemporalEdgeStream, tau: int) -> list[Bucket]:
    """Split the interactions into ``tau`` buckets of (near) equal count.

    Repeats of a pair inside one bucket collapse to one edge weighted by the
    number of occurrences. Self-loops are dropped.
    """
    if tau < 1:
        raise InvalidArgument("tau must be positive")
    if len(stream) < tau:
        raise InvalidArgument(f"{len(stream)} interactions cannot fill {tau} buckets")
    out = []
    start = 0
    for i, size in enumerate(bucket_sizes(len(stream), tau)):
        weights: dict[tuple[int, int], int] = {}
        for u, v, _ in stream.edges[start:start + size]:
            if u == v:
                continue
            key = (u, v) if stream.directed or u < v else (v, u)
            weights[key] = weights.get(key, 0) + 1
        out.append(Bucket(i + 1, weights))
        start += size
    return out


def split_static(g: Graph, fractions: Sequence[float] = (0.85, 0.05, 0.10), seed: int = 0):
    """Seeded uniform partition of the edge set into train/validation/test lists."""
    if len(fractions) != 3 or abs(sum(fractions) - 1.0) > 1e-9 or min(fractions) < 0:
        raise InvalidArgument(f"fractions {fractions} must be three non-negatives summing to 1")
    edges = list(g.edges())
    m = len(edges)
    n_val = int(round(fractions[1] * m))
    n_test = int(round(fractions[2] * m))
    n_train = m - n_val - n_test
    for frac, size, name in zip(fractions, (n_train, n_val, n_test), ("train", "validation", "test")):
        if frac > 0 and size <= 0:
            raise InvalidArgument(f"{name} split is empty for {m} edges")
    perm = np.random.default_rng(seed).permutation(m)
    shuffled = [edges[i] for i in perm]
    return (sorted(shuffled[:n_train]),
            sorted(shuffled[n_train:n_train + n_val]),
            sorted(shuffled[n_train + n_val:]))


def graph_from_edges(nodes: Iterable[int], edges: Iterable[tuple[int, int]], directed: bool) -> Graph:
    g = Graph(directed, nodes)
    for u, v in edges:
        g.add_edge(u, v)
    return g
