"""Enumerate k-node contexts around a graph change and count their SSTs."""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .graph import ChangeKind, Graph, GraphChange, InvalidArgument
from .labeler import MAX_NODES, LabelRegistry, TransitionLabeler, element_present
from .traits import TraitSpec, TraitUpdater, specs_of


def _connected_without(g: Graph, nodes: set[int], drop: int) -> bool:
    rest = nodes - {drop}
    start = next(iter(rest))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in g.neighbors(u):
            if w in rest and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(rest)


def _parent_vertex(g: Graph, nodes: set[int], anchors: frozenset[int]) -> int:
    """Largest non-anchor vertex whose removal keeps ``nodes`` connected."""
    for x in sorted(nodes - anchors, reverse=True):
        if _connected_without(g, nodes, x):
            return x
    raise AssertionError("connected set without a removable vertex")


def enumerate_contexts(g: Graph, anchors: Sequence[int], k: int) -> Iterator[frozenset[int]]:
    """Every connected ``k``-node set containing ``anchors``, each exactly once.

    Reverse search: the parent of a set drops its largest-id non-anchor vertex
    that is not a cut vertex, so walking children that name their own parent
    visits each set once without a visited table. Connectivity is judged on the
    undirected skeleton of ``g`` as given.
    """
    base = frozenset(anchors)
    if not 1 <= len(base) <= 2:
        raise InvalidArgument("contexts need one or two anchor nodes")
    if k < len(base):
        raise InvalidArgument(f"k={k} is smaller than the anchor count")
    for a in base:
        if a not in g:
            raise InvalidArgument(f"anchor {a} not in graph")
    if len(base) == 2:
        u, v = tuple(base)
        if v not in g.neighbors(u):
            return
    if k == len(base):
        yield base
        return

    def children(nodes: frozenset[int]) -> Iterator[frozenset[int]]:
        frontier = set()
        for x in nodes:
            frontier |= g.neighbors(x)
        frontier -= nodes
        for w in sorted(frontier):
            child = nodes | {w}
            if _parent_vertex(g, set(child), base) == w:
                yield child

    stack = [base]
    while stack:
        cur = stack.pop()
        for child in children(cur):
            if len(child) == k:
                yield child
            else:
                stack.append(child)


@dataclass
class CounterConfig:
    k: int = 3
    kinds: tuple[ChangeKind, ...] = tuple(ChangeKind)
    traits: tuple[TraitSpec, ...] = ()
    updaters: tuple[TraitUpdater, ...] = ()

    def __post_init__(self):
        if not 2 <= self.k <= MAX_NODES:
            raise InvalidArgument(f"k must be in [2, {MAX_NODES}]")

    def active_traits(self) -> list[TraitSpec]:
        out = list(self.traits)
        for spec in specs_of(self.updaters):
            if spec not in out:
                out.append(spec)
        return out


@dataclass
class SstVector:
    """Sparse SST counts for one change, keyed by registry id."""

    counts: dict[int, int] = field(default_factory=dict)
    change: GraphChange | None = None
    k: int = 0
    total: int = 0

    def to_json(self, registry: LabelRegistry) -> dict:
        return {
            "change": self.change.to_json() if self.change else None,
            "k": self.k,
            "total": self.total,
            "entries": [{"label_id": i, "H": registry.string(i), "count": c}
                        for i, c in sorted(self.counts.items())],
        }


def context_strings(g: Graph, change: GraphChange, k: int,
                    labeler: TransitionLabeler) -> Counter:
    """Counter of canonical strings over all contexts of ``change``.

    Additions are applied temporarily (a graph that already holds the added
    element is taken to be the after-state). ``g`` is restored before returning.
    """
    applied = False
    if not element_present(g, change):
        if not change.kind.is_addition:
            raise InvalidArgument("deleted element is absent from the graph")
        g.apply(change)
        applied = True
    elif not change.kind.is_addition:
        g.check_change(change)
    try:
        # node changes use k nodes in the state where the node exists
        out: Counter = Counter()
        for nodes in enumerate_contexts(g, change.anchors, k):
            out[labeler.string_for(g, nodes, change)] += 1
        return out
    finally:
        if applied:
            g.revert(change)


def count_transitions(g: Graph, change: GraphChange, cfg: CounterConfig,
                      labeler: TransitionLabeler | None = None) -> SstVector:
    """SST count vector of one change; pre-label updaters must already have run."""
    if change.kind not in cfg.kinds:
        raise InvalidArgument(f"change kind {change.kind.name} is disabled")
    labeler = labeler or TransitionLabeler(cfg.active_traits())
    strings = context_strings(g, change, cfg.k, labeler)
    counts: dict[int, int] = {}
    for h in sorted(strings):
        counts[labeler.registry.intern(h)] = strings[h]
    return SstVector(counts, change, cfg.k, sum(strings.values()))


class TransitionCounter:
    """Runs updater hooks around ``count_transitions`` for a batch of changes."""

    def __init__(self, cfg: CounterConfig, registry: LabelRegistry | None = None):
        self.cfg = cfg
        self.labeler = TransitionLabeler(cfg.active_traits(), registry)

    @property
    def registry(self) -> LabelRegistry:
        return self.labeler.registry

    def begin(self, g: Graph) -> None:
        for up in self.cfg.updaters:
            up.before_batch(g)

    def end(self, g: Graph) -> None:
        for up in self.cfg.updaters:
            up.after_batch(g)

    def strings(self, g: Graph, change: GraphChange) -> Counter:
        for up in self.cfg.updaters:
            replaced = up.pre_label(g, change)
            if replaced is not None:
                change = replaced
        try:
            return context_strings(g, change, self.cfg.k, self.labeler)
        finally:
            for up in self.cfg.updaters:
                up.post_label(g, change)

    def count(self, g: Graph, change: GraphChange) -> SstVector:
        strings = self.strings(g, change)
        counts = {self.registry.intern(h): strings[h] for h in sorted(strings)}
        return SstVector(counts, change, self.cfg.k, sum(strings.values()))

    def count_many(self, g: Graph, changes: Sequence[GraphChange],
                   threads: int = 1) -> list[Counter]:
        """Canonical-string counters for many changes (not interned).

        With ``threads > 1`` the work is split across forked worker processes
        that share ``g`` read-only; results come back in input order.
        """
        if threads <= 1 or len(changes) < 64:
            return [self.strings(g, c) for c in changes]
        chunks = _chunks(list(changes), threads * 4)
        global _WORKER_STATE
        _WORKER_STATE = (self, g)
        try:
            import multiprocessing as mp
            ctx = mp.get_context("fork")
            with ProcessPoolExecutor(max_workers=threads, mp_context=ctx) as pool:
                parts = list(pool.map(_count_chunk, chunks))
        finally:
            _WORKER_STATE = None
        return [c for part in parts for c in part]


_WORKER_STATE = None


def _count_chunk(changes: list[GraphChange]) -> list[Counter]:
    counter, g = _WORKER_STATE
    return [counter.strings(g, c) for c in changes]


def _chunks(items: list, n: int) -> list[list]:
    size = max(1, -(-len(items) // n))
    return [items[i:i + size] for i in range(0, len(items), size)]


def default_threads() -> int:
    return os.cpu_count() or 1


def edge_change_vectors(g: Graph, edges: Iterable[tuple[int, int]], counter: TransitionCounter,
                        threads: int = 1) -> list[Counter]:
    """SST string counters for adding each listed edge (absent from ``g``)."""
    return counter.count_many(g, [GraphChange.edge_addition(u, v) for u, v in edges], threads)
