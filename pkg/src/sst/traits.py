"""Class/rank trait specs, rank projection, and trait updaters."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Sequence

from .graph import ChangeKind, Graph, GraphChange, InvalidArgument


class TraitKind(str, Enum):
    CLASS = "class"
    RANK = "rank"


class Scope(str, Enum):
    NODE = "node"
    EDGE = "edge"


@dataclass(frozen=True)
class TraitSpec:
    name: str
    kind: TraitKind
    scope: Scope
    values: tuple = ()  # finite domain for class traits; empty means unchecked
    default: Any = None

    def check(self, value: Any) -> None:
        if self.kind is TraitKind.CLASS and self.values and value not in self.values:
            raise InvalidArgument(f"{value!r} not a value of class trait {self.name}")


def rank_projection(values: Sequence[Any]) -> list[int]:
    """Dense 1-based ranks, largest value first; ties share a rank.

    >>> rank_projection([30, 4, 12, 4])
    [1, 3, 2, 3]
    """
    if not values:
        raise InvalidArgument("rank_projection needs at least one value")
    try:
        distinct = sorted(set(values), reverse=True)
    except TypeError as exc:
        raise InvalidArgument(f"values are not mutually comparable: {exc}") from None
    rank = {v: i + 1 for i, v in enumerate(distinct)}
    return [rank[v] for v in values]


# -- updaters -------------------------------------------------------------

PHASES = ("before_batch", "pre_label", "post_label", "after_batch")


class TraitUpdater:
    """Hook object run by the transition counter at fixed phases.

    Subclasses override any of the phase methods. ``pre_label`` may return a
    replacement change (e.g. with trait values for the edge being added).
    Updaters must only touch trait values, never topology.
    """

    name = "updater"
    specs: tuple[TraitSpec, ...] = ()

    def before_batch(self, g: Graph) -> None:
        pass

    def pre_label(self, g: Graph, change: GraphChange) -> GraphChange | None:
        return None

    def post_label(self, g: Graph, change: GraphChange) -> None:
        pass

    def after_batch(self, g: Graph) -> None:
        pass


DEG_CMP = TraitSpec("deg_cmp", TraitKind.CLASS, Scope.NODE,
                    values=("none", "equal", "higher", "lesser"), default="none")


class DegreeComparison(TraitUpdater):
    """Marks the endpoints of an undirected edge addition by relative degree."""

    name = "degree_comparison"
    specs = (DEG_CMP,)

    def pre_label(self, g, change):
        if change.kind is not ChangeKind.EDGE_ADDITION:
            return None
        u, v = change.anchors
        for node, val in zip((u, v), degree_classes(g.degree(u), g.degree(v))):
            g.set_node_trait(DEG_CMP.name, node, val)
        return None

    def post_label(self, g, change):
        store = g.node_traits.get(DEG_CMP.name, {})
        for node in change.anchors:
            store.pop(node, None)


def degree_classes(du: int, dv: int) -> tuple[str, str]:
    if du == dv:
        return ("equal", "equal")
    return ("higher", "lesser") if du > dv else ("lesser", "higher")


RECENCY = TraitSpec("recency", TraitKind.CLASS, Scope.EDGE,
                    values=("never", "newest", "new", "old"))
FREQUENCY = TraitSpec("frequency", TraitKind.CLASS, Scope.EDGE,
                      values=("0", "1", "2", "3+"))


def recency_class(last_bucket: int | None, current: int) -> str:
    if last_bucket is None:
        return "never"
    gap = current - last_bucket
    if gap <= 0:
        raise InvalidArgument(f"history bucket {last_bucket} is not before {current}")
    if gap == 1:
        return "newest"
    if gap == 2:
        return "new"
    return "old"


def frequency_class(count: int) -> str:
    return str(count) if count < 3 else "3+"


@dataclass
class EdgeHistory:
    """Per-edge sorted list of bucket indices in which the edge occurred."""

    directed: bool
    buckets: dict[tuple[int, int], list[int]] = field(default_factory=dict)

    def key(self, u: int, v: int) -> tuple[int, int]:
        return (u, v) if self.directed or u < v else (v, u)

    def record(self, u: int, v: int, bucket: int) -> None:
        seen = self.buckets.setdefault(self.key(u, v), [])
        if not seen or seen[-1] != bucket:
            if seen and seen[-1] > bucket:
                raise InvalidArgument("buckets must be recorded in order")
            seen.append(bucket)

    def before(self, t: int) -> "EdgeHistory":
        """Copy restricted to buckets strictly earlier than ``t``."""
        out = EdgeHistory(self.directed)
        for e, seen in self.buckets.items():
            kept = [b for b in seen if b < t]
            if kept:
                out.buckets[e] = kept
        return out

    def last(self, u: int, v: int) -> int | None:
        seen = self.buckets.get(self.key(u, v))
        return seen[-1] if seen else None

    def count(self, u: int, v: int) -> int:
        return len(self.buckets.get(self.key(u, v), ()))

    def latest_bucket(self) -> int | None:
        return max((s[-1] for s in self.buckets.values()), default=None)


def recency_of(history: EdgeHistory, u: int, v: int, current: int) -> str:
    return recency_class(history.last(u, v), current)


def frequency_of(history: EdgeHistory, u: int, v: int) -> str:
    return frequency_class(history.count(u, v))


class TemporalTraits(TraitUpdater):
    """Maintains the recency and frequency edge traits for bucket ``current``.

    Only history strictly before ``current`` is consulted; the history passed in
    is truncated on construction so later buckets cannot leak in.
    """

    name = "temporal_traits"
    specs = (RECENCY, FREQUENCY)

    def __init__(self, history: EdgeHistory, current: int):
        self.current = current
        self.history = history.before(current)

    def assignment(self, u: int, v: int) -> dict[str, str]:
        return {
            RECENCY.name: recency_of(self.history, u, v, self.current),
            FREQUENCY.name: frequency_of(self.history, u, v),
        }

    def before_batch(self, g):
        for name in (RECENCY.name, FREQUENCY.name):
            g.edge_traits[name] = {}
        for u, v in g.edges():
            for name, val in self.assignment(u, v).items():
                g.set_edge_trait(name, u, v, val)

    def pre_label(self, g, change):
        if change.kind is ChangeKind.EDGE_ADDITION:
            return change.with_edge_traits(self.assignment(*change.anchors))
        return None


@dataclass
class FunctionUpdater(TraitUpdater):
    """Wraps a plain callable as an updater bound to one phase."""

    phase: str
    fn: Callable
    name: str = "function"

    def __post_init__(self):
        if self.phase not in PHASES:
            raise InvalidArgument(f"unknown phase {self.phase}")

    def before_batch(self, g):
        if self.phase == "before_batch":
            self.fn(g)

    def pre_label(self, g, change):
        if self.phase == "pre_label":
            return self.fn(g, change)
        return None

    def post_label(self, g, change):
        if self.phase == "post_label":
            self.fn(g, change)

    def after_batch(self, g):
        if self.phase == "after_batch":
            self.fn(g)


def specs_of(updaters: Iterable[TraitUpdater]) -> list[TraitSpec]:
    out: list[TraitSpec] = []
    for up in updaters:
        for spec in up.specs:
            if spec not in out:
                out.append(spec)
    return out
