"""Simple directed/undirected graphs with trait stores and an undoable change API."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Iterator


class InvalidArgument(ValueError):
    pass


class InvalidChange(ValueError):
    pass


class ChangeKind(str, Enum):
    EDGE_ADDITION = "EA"
    EDGE_DELETION = "ED"
    NODE_ADDITION = "NA"
    NODE_DELETION = "ND"

    @property
    def is_edge(self) -> bool:
        return self in (ChangeKind.EDGE_ADDITION, ChangeKind.EDGE_DELETION)

    @property
    def is_addition(self) -> bool:
        return self in (ChangeKind.EDGE_ADDITION, ChangeKind.NODE_ADDITION)


@dataclass(frozen=True)
class GraphChange:
    """One edge/node addition or deletion.

    ``anchors`` holds the two endpoints for edge changes and the single node for
    node changes. Node changes carry their incident edges. ``edge_traits`` and
    ``node_traits`` hold trait values for the element being added.
    """

    kind: ChangeKind
    anchors: tuple[int, ...]
    incident: tuple[tuple[int, int], ...] = ()
    edge_traits: tuple[tuple[str, Any], ...] = ()
    node_traits: tuple[tuple[str, Any], ...] = ()

    @classmethod
    def edge_addition(cls, u: int, v: int, traits: dict | None = None) -> "GraphChange":
        return cls(ChangeKind.EDGE_ADDITION, (u, v), edge_traits=_frozen(traits))

    @classmethod
    def edge_deletion(cls, u: int, v: int) -> "GraphChange":
        return cls(ChangeKind.EDGE_DELETION, (u, v))

    @classmethod
    def node_addition(cls, x: int, edges: Iterable[tuple[int, int]],
                      traits: dict | None = None) -> "GraphChange":
        return cls(ChangeKind.NODE_ADDITION, (x,), tuple(edges), node_traits=_frozen(traits))

    @classmethod
    def node_deletion(cls, g: "Graph", x: int) -> "GraphChange":
        if x not in g:
            raise InvalidChange(f"node {x} not in graph")
        return cls(ChangeKind.NODE_DELETION, (x,), tuple(g.incident_edges(x)))

    def with_edge_traits(self, traits: dict) -> "GraphChange":
        merged = dict(self.edge_traits)
        merged.update(traits)
        return GraphChange(self.kind, self.anchors, self.incident, _frozen(merged), self.node_traits)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind.value, "anchors": list(self.anchors)}
        if self.incident:
            out["incident"] = [list(e) for e in self.incident]
        if self.edge_traits:
            out["edge_traits"] = dict(self.edge_traits)
        if self.node_traits:
            out["node_traits"] = dict(self.node_traits)
        return out


def _frozen(traits: dict | None) -> tuple[tuple[str, Any], ...]:
    return tuple(sorted((traits or {}).items()))


@dataclass
class _Undo:
    change: GraphChange
    removed_node_traits: dict = field(default_factory=dict)
    removed_edge_traits: dict = field(default_factory=dict)


class Graph:
    """Simple graph over integer node ids.

    Undirected graphs store each edge once under the key ``(min, max)``; the
    adjacency sets are symmetric. Directed graphs keep separate out/in sets.
    """

    def __init__(self, directed: bool = False, nodes: Iterable[int] = ()):
        self.directed = directed
        self._succ: dict[int, set[int]] = {}
        self._pred: dict[int, set[int]] = {}
        self.node_traits: dict[str, dict[int, Any]] = {}
        self.edge_traits: dict[str, dict[tuple[int, int], Any]] = {}
        # original node labels for reporting, filled by loaders
        self.labels: dict[int, str] = {}
        self._n_edges = 0
        self._undo: list[_Undo] = []
        for v in nodes:
            self.add_node(v)

    # -- basic structure -------------------------------------------------

    def __contains__(self, v: int) -> bool:
        return v in self._succ

    def __len__(self) -> int:
        return len(self._succ)

    def nodes(self) -> list[int]:
        return sorted(self._succ)

    def number_of_edges(self) -> int:
        return self._n_edges

    def edge_key(self, u: int, v: int) -> tuple[int, int]:
        if self.directed or u < v:
            return (u, v)
        return (v, u)

    def add_node(self, v: int) -> None:
        if v not in self._succ:
            self._succ[v] = set()
            self._pred[v] = self._succ[v] if not self.directed else set()

    def has_edge(self, u: int, v: int) -> bool:
        s = self._succ.get(u)
        return s is not None and v in s

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise InvalidArgument(f"self-loop on {u}")
        self.add_node(u)
        self.add_node(v)
        if v in self._succ[u]:
            return
        self._succ[u].add(v)
        self._pred[v].add(u)
        self._n_edges += 1

    def remove_edge(self, u: int, v: int) -> None:
        if not self.has_edge(u, v):
            raise InvalidArgument(f"no edge ({u}, {v})")
        self._succ[u].discard(v)
        self._pred[v].discard(u)
        self._n_edges -= 1
        key = self.edge_key(u, v)
        for store in self.edge_traits.values():
            store.pop(key, None)

    def remove_node(self, v: int) -> None:
        for e in list(self.incident_edges(v)):
            self.remove_edge(*e)
        del self._succ[v]
        if self.directed:
            del self._pred[v]
        else:
            self._pred.pop(v, None)
        for store in self.node_traits.values():
            store.pop(v, None)

    def successors(self, v: int) -> set[int]:
        return self._succ[v]

    def predecessors(self, v: int) -> set[int]:
        return self._pred[v]

    def neighbors(self, v: int) -> set[int]:
        """Neighbors on the undirected skeleton."""
        if not self.directed:
            return self._succ[v]
        return self._succ[v] | self._pred[v]

    def degree(self, v: int) -> int:
        if not self.directed:
            return len(self._succ[v])
        return len(self._succ[v]) + len(self._pred[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in sorted(self._succ):
            for v in sorted(self._succ[u]):
                if self.directed or u < v:
                    yield (u, v)

    def incident_edges(self, v: int) -> list[tuple[int, int]]:
        out = [(v, w) for w in sorted(self._succ[v])]
        if self.directed:
            out += [(w, v) for w in sorted(self._pred[v])]
        return [self.edge_key(a, b) for a, b in out]

    def copy(self) -> "Graph":
        g = Graph(self.directed, self._succ)
        for u, v in self.edges():
            g.add_edge(u, v)
        g.node_traits = {k: dict(s) for k, s in self.node_traits.items()}
        g.edge_traits = {k: dict(s) for k, s in self.edge_traits.items()}
        g.labels = dict(self.labels)
        return g

    # -- traits ----------------------------------------------------------

    def set_node_trait(self, name: str, v: int, value: Any) -> None:
        if v not in self:
            raise InvalidArgument(f"unknown node {v}")
        self.node_traits.setdefault(name, {})[v] = value

    def set_edge_trait(self, name: str, u: int, v: int, value: Any) -> None:
        if not self.has_edge(u, v):
            raise InvalidArgument(f"no edge ({u}, {v})")
        self.edge_traits.setdefault(name, {})[self.edge_key(u, v)] = value

    def edge_trait(self, name: str, u: int, v: int, default: Any = None) -> Any:
        return self.edge_traits.get(name, {}).get(self.edge_key(u, v), default)

    # -- change API --------------------------------------------------------

    def check_change(self, c: GraphChange) -> None:
        if c.kind.is_edge:
            u, v = c.anchors
            if u not in self or v not in self:
                raise InvalidChange(f"unknown endpoint in {c.anchors}")
            if c.kind is ChangeKind.EDGE_ADDITION and (u == v or self.has_edge(u, v)):
                raise InvalidChange(f"cannot add edge {c.anchors}")
            if c.kind is ChangeKind.EDGE_DELETION and not self.has_edge(u, v):
                raise InvalidChange(f"cannot delete absent edge {c.anchors}")
            return
        (x,) = c.anchors
        if c.kind is ChangeKind.NODE_ADDITION:
            if x in self:
                raise InvalidChange(f"node {x} already present")
            for a, b in c.incident:
                if x not in (a, b) or a == b:
                    raise InvalidChange(f"edge {(a, b)} is not incident to {x}")
                other = b if a == x else a
                if other not in self:
                    raise InvalidChange(f"edge {(a, b)} reaches unknown node {other}")
        else:
            if x not in self:
                raise InvalidChange(f"node {x} not present")
            if sorted(self.edge_key(*e) for e in c.incident) != sorted(self.incident_edges(x)):
                raise InvalidChange(f"incident edges of {x} do not match the graph")

    def apply(self, c: GraphChange) -> None:
        self.check_change(c)
        undo = _Undo(c)
        if c.kind is ChangeKind.EDGE_ADDITION:
            u, v = c.anchors
            self.add_edge(u, v)
            for name, val in c.edge_traits:
                self.set_edge_trait(name, u, v, val)
        elif c.kind is ChangeKind.EDGE_DELETION:
            u, v = c.anchors
            key = self.edge_key(u, v)
            undo.removed_edge_traits = {n: s[key] for n, s in self.edge_traits.items() if key in s}
            self.remove_edge(u, v)
        elif c.kind is ChangeKind.NODE_ADDITION:
            (x,) = c.anchors
            self.add_node(x)
            for a, b in c.incident:
                self.add_edge(a, b)
            for name, val in c.node_traits:
                self.set_node_trait(name, x, val)
        else:
            (x,) = c.anchors
            undo.removed_node_traits = {n: s[x] for n, s in self.node_traits.items() if x in s}
            undo.removed_edge_traits = {
                e: {n: s[e] for n, s in self.edge_traits.items() if e in s}
                for e in self.incident_edges(x)
            }
            self.remove_node(x)
        self._undo.append(undo)

    def revert(self, c: GraphChange) -> None:
        if not self._undo or self._undo[-1].change != c:
            raise InvalidChange("revert does not match the most recent applied change")
        undo = self._undo.pop()
        if c.kind is ChangeKind.EDGE_ADDITION:
            self.remove_edge(*c.anchors)
        elif c.kind is ChangeKind.EDGE_DELETION:
            u, v = c.anchors
            self.add_edge(u, v)
            for name, val in undo.removed_edge_traits.items():
                self.set_edge_trait(name, u, v, val)
        elif c.kind is ChangeKind.NODE_ADDITION:
            self.remove_node(c.anchors[0])
        else:
            (x,) = c.anchors
            self.add_node(x)
            for a, b in c.incident:
                self.add_edge(a, b)
            for name, val in undo.removed_node_traits.items():
                self.set_node_trait(name, x, val)
            for e, traits in undo.removed_edge_traits.items():
                for name, val in traits.items():
                    self.set_edge_trait(name, e[0], e[1], val)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "directed": self.directed,
            "nodes": self.nodes(),
            "edges": [list(e) for e in self.edges()],
            "node_traits": {k: {str(v): val for v, val in sorted(s.items())}
                            for k, s in sorted(self.node_traits.items()) if s},
            "edge_traits": {k: {f"{a},{b}": val for (a, b), val in sorted(s.items())}
                            for k, s in sorted(self.edge_traits.items()) if s},
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=str)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.serialize() == other.serialize()

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph({kind}, n={len(self)}, m={self._n_edges})"


def apply_change(g: Graph, c: GraphChange) -> Graph:
    g.apply(c)
    return g


def revert_change(g: Graph, c: GraphChange) -> Graph:
    g.revert(c)
    return g


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    nodes = sorted(set(s))
    for v in nodes:
        if v not in g:
            raise InvalidArgument(f"unknown node {v}")
    keep = set(nodes)
    h = Graph(g.directed, nodes)
    for u in nodes:
        for v in g.successors(u):
            if v in keep:
                h.add_edge(u, v)
    for name, store in g.node_traits.items():
        h.node_traits[name] = {v: val for v, val in store.items() if v in keep}
    for name, store in g.edge_traits.items():
        h.edge_traits[name] = {e: val for e, val in store.items() if e[0] in keep and e[1] in keep}
    return h


def bfs_distances(g: Graph, source: int, limit: int, directed_distance: bool = False,
                  skip_edge: tuple[int, int] | None = None) -> dict[int, int]:
    """Hop distances from ``source`` up to ``limit``.

    Distances follow the undirected skeleton unless ``directed_distance`` is set.
    ``skip_edge`` is treated as absent (in both directions only if the graph is
    undirected).
    """
    dist = {source: 0}
    frontier = deque([source])
    skip = None
    if skip_edge is not None:
        skip = {skip_edge} if g.directed else {skip_edge, skip_edge[::-1]}
    while frontier:
        u = frontier.popleft()
        d = dist[u]
        if d == limit:
            continue
        nbrs = g.successors(u) if directed_distance else g.neighbors(u)
        for w in nbrs:
            if w in dist:
                continue
            if skip is not None and not _edge_usable(g, u, w, skip, directed_distance):
                continue
            dist[w] = d + 1
            frontier.append(w)
    return dist


def _edge_usable(g: Graph, u: int, w: int, skip: set, directed_distance: bool) -> bool:
    # some connection between u and w must remain once the skipped edge is gone
    if directed_distance or not g.directed:
        return (u, w) not in skip
    fwd = g.has_edge(u, w) and (u, w) not in skip
    back = g.has_edge(w, u) and (w, u) not in skip
    return fwd or back


def within_k_hops(g: Graph, k: int, directed_distance: bool = False) -> set[tuple[int, int]]:
    """Node pairs at hop distance 1..k.

    Undirected graphs yield ``(u, v)`` with ``u < v``; directed graphs yield both
    orders. Distance is measured on the undirected skeleton by default.
    """
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    pairs = set()
    for u in g.nodes():
        for v, d in bfs_distances(g, u, k, directed_distance).items():
            if d == 0:
                continue
            if g.directed or u < v:
                pairs.add((u, v))
    return pairs
