"""Canonical labels for subgraph-to-subgraph transitions.

A transition is encoded as one colored graph: the subgraph in the state where
the changed element exists, with that element carrying a unique marker. Colors
are refined 1-WL style (edge colors and directions folded into the node
signatures); remaining ties are broken by individualization-refinement, keeping
the lexicographically smallest serialization. Automorphisms found between equal
leaves prune sibling branches.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .graph import ChangeKind, Graph, GraphChange, InvalidArgument
from .traits import Scope, TraitKind, TraitSpec, rank_projection

MAX_NODES = 9

_FORBIDDEN = re.compile(r"[\[\],|* ]")


class UnsupportedSize(InvalidArgument):
    pass


class InvalidContext(InvalidArgument):
    pass


@dataclass
class ColoredGraph:
    """Small graph with node/edge color tuples.

    ``node_colors[i]`` and edge color values are tuples whose first entry is the
    marker (``True`` only on the changed element) followed by trait values.
    Undirected edges are keyed ``(i, j)`` with ``i < j``.
    """

    n: int
    directed: bool
    node_colors: list[tuple]
    edges: dict[tuple[int, int], tuple]
    kind: ChangeKind = ChangeKind.EDGE_ADDITION
    node_trait_names: tuple[str, ...] = ()
    edge_trait_names: tuple[str, ...] = ()


def _dense(items: Sequence) -> list[int]:
    rank = {c: i for i, c in enumerate(sorted(set(items)))}
    return [rank[c] for c in items]


def refine(colors: list[int], adj: list[list[tuple[int, int]]]) -> list[int]:
    """Color refinement to the coarsest stable partition.

    ``adj[i]`` holds ``(code, j)`` pairs where ``code`` folds edge color and
    direction. The result is a dense recoloring that only depends on the
    isomorphism class of the input.
    """
    n_classes = len(set(colors))
    while True:
        sigs = [(colors[i], tuple(sorted((code, colors[j]) for code, j in adj[i])))
                for i in range(len(colors))]
        new = _dense(sigs)
        n_new = len(set(new))
        if n_new == n_classes:
            return new
        colors, n_classes = new, n_new


def _adjacency(cg: ColoredGraph) -> tuple[list[int], list[list[tuple[int, int]]], dict]:
    node_ids = _dense(cg.node_colors)
    ekeys = list(cg.edges)
    ecolor = dict(zip(ekeys, _dense([cg.edges[e] for e in ekeys])))
    adj: list[list[tuple[int, int]]] = [[] for _ in range(cg.n)]
    for (i, j), c in ecolor.items():
        if cg.directed:
            adj[i].append((2 * c + 1, j))
            adj[j].append((2 * c, i))
        else:
            adj[i].append((c, j))
            adj[j].append((c, i))
    return node_ids, adj, ecolor


def _orbit_root(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def canonical_order(cg: ColoredGraph) -> list[int]:
    """Canonical node ordering: ``order[p]`` is the node placed at position ``p``."""
    n = cg.n
    if n == 0:
        return []
    init, adj, ecolor = _adjacency(cg)
    directed = cg.directed

    def leaf_key(order: list[int]) -> tuple:
        pos = [0] * n
        for p, v in enumerate(order):
            pos[v] = p
        es = []
        for (i, j), c in ecolor.items():
            a, b = pos[i], pos[j]
            if not directed and a > b:
                a, b = b, a
            es.append((a, b, c))
        es.sort()
        return (tuple(init[v] for v in order), tuple(es))

    best: list[Any] = [None, None]
    leaves: dict[tuple, list[int]] = {}
    autos: list[list[int]] = []

    def search(colors: list[int], prefix: tuple[int, ...]) -> None:
        colors = refine(colors, adj)
        counts: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            counts.setdefault(c, []).append(v)
        cells = [counts[c] for c in sorted(counts) if len(counts[c]) > 1]
        if not cells:
            order = sorted(range(n), key=colors.__getitem__)
            key = leaf_key(order)
            seen = leaves.get(key)
            if seen is None:
                leaves[key] = order
            else:
                perm = [0] * n
                for a, b in zip(seen, order):
                    perm[a] = b
                autos.append(perm)
            if best[0] is None or key < best[0]:
                best[0], best[1] = key, order
            return
        cell = cells[0]
        target = colors[cell[0]]
        done: list[int] = []
        for v in cell:
            if done and autos:
                parent = list(range(n))
                for perm in autos:
                    if all(perm[p] == p for p in prefix):
                        for a in range(n):
                            ra, rb = _orbit_root(parent, a), _orbit_root(parent, perm[a])
                            if ra != rb:
                                parent[ra] = rb
                rv = _orbit_root(parent, v)
                if any(_orbit_root(parent, x) == rv for x in done):
                    continue
            done.append(v)
            split = [2 * c + (1 if c == target and u != v else 0) for u, c in enumerate(colors)]
            search(split, prefix + (v,))

    search(list(init), ())
    return best[1]


def _render(values: Iterable[Any]) -> str:
    vals = [str(v) for v in values]
    return "[" + ",".join(vals) + "]" if vals else ""


def serialize(cg: ColoredGraph, order: Sequence[int]) -> str:
    """Canonical string for ``cg`` under ``order``.

    Layout: ``kind|U or D|n|node trait names|edge trait names|nodes|edges``.
    Nodes are ``*`` (marked) or ``o`` followed by their trait values; edges are
    ``a-b`` / ``a>b`` in position indices, ``*`` on the changed edge.
    """
    pos = {v: p for p, v in enumerate(order)}
    nodes = []
    for v in order:
        marked, *vals = cg.node_colors[v]
        nodes.append(("*" if marked else "o") + _render(vals))
    edges = []
    for (i, j), color in cg.edges.items():
        a, b = pos[i], pos[j]
        if not cg.directed and a > b:
            a, b = b, a
        marked, *vals = color
        edges.append(((a, b), f"{a}{'>' if cg.directed else '-'}{b}{'*' if marked else ''}{_render(vals)}"))
    edges.sort()
    return "|".join([
        cg.kind.value,
        "D" if cg.directed else "U",
        str(cg.n),
        ",".join(cg.node_trait_names),
        ",".join(cg.edge_trait_names),
        " ".join(nodes),
        " ".join(e for _, e in edges),
    ])


def decode(h: str) -> dict:
    """Parse a canonical string back into nodes, edges and the marked element."""
    try:
        kind, d, n, ntn, etn, nodes, edges = h.split("|")
    except ValueError:
        raise InvalidArgument(f"malformed label {h!r}") from None
    node_names = ntn.split(",") if ntn else []
    edge_names = etn.split(",") if etn else []

    def traits(tok: str, names: list[str]) -> dict:
        if "[" not in tok:
            return {}
        vals = tok[tok.index("[") + 1:-1].split(",")
        return dict(zip(names, vals))

    out_nodes = []
    for tok in nodes.split(" ") if nodes else []:
        out_nodes.append({"marked": tok.startswith("*"), "traits": traits(tok, node_names)})
    out_edges = []
    sep = ">" if d == "D" else "-"
    for tok in edges.split(" ") if edges else []:
        head = tok.split("[")[0]
        marked = head.endswith("*")
        a, b = head.rstrip("*").split(sep)
        out_edges.append({"src": int(a), "dst": int(b), "marked": marked,
                          "traits": traits(tok, edge_names)})
    if len(out_nodes) != int(n):
        raise InvalidArgument(f"malformed label {h!r}")
    return {"kind": ChangeKind(kind).name.lower(), "directed": d == "D", "n": int(n),
            "nodes": out_nodes, "edges": out_edges}


def describe(h: str) -> str:
    """One-line human-readable rendering of a label."""
    info = decode(h)
    parts = []
    for p, node in enumerate(info["nodes"]):
        t = ",".join(f"{k}={v}" for k, v in node["traits"].items())
        if node["marked"] or t:
            parts.append(f"n{p}{'*' if node['marked'] else ''}({t})")
    sep = "->" if info["directed"] else "--"
    for e in info["edges"]:
        t = ",".join(f"{k}={v}" for k, v in e["traits"].items())
        mark = " NEW" if e["marked"] else ""
        parts.append(f"{e['src']}{sep}{e['dst']}{mark}" + (f"({t})" if t else ""))
    return f"{info['kind']} n={info['n']}: " + "; ".join(parts)


@dataclass(frozen=True)
class SstLabel:
    id: int
    H: str

    def decode(self) -> dict:
        return decode(self.H)

    def describe(self) -> str:
        return describe(self.H)


class LabelRegistry:
    """Interns canonical strings to dense integer ids (thread-safe)."""

    def __init__(self, strings: Iterable[str] = ()):
        self._ids: dict[str, int] = {}
        self._strings: list[str] = []
        self._lock = threading.Lock()
        for h in strings:
            self.intern(h)

    def intern(self, h: str) -> int:
        got = self._ids.get(h)
        if got is not None:
            return got
        with self._lock:
            got = self._ids.get(h)
            if got is None:
                got = len(self._strings)
                self._strings.append(h)
                self._ids[h] = got
            return got

    def get(self, h: str) -> int | None:
        return self._ids.get(h)

    def string(self, i: int) -> str:
        return self._strings[i]

    def label(self, i: int) -> SstLabel:
        return SstLabel(i, self._strings[i])

    def __len__(self) -> int:
        return len(self._strings)

    def strings(self) -> list[str]:
        return list(self._strings)


def canonical_string(cg: ColoredGraph) -> str:
    if cg.n > MAX_NODES:
        raise UnsupportedSize(f"{cg.n} nodes exceeds the {MAX_NODES}-node limit")
    return serialize(cg, canonical_order(cg))


def _class_value(v: Any) -> str:
    return "~" if v is None else str(v)


def _check_value(v: Any) -> Any:
    if isinstance(v, str) and _FORBIDDEN.search(v):
        raise InvalidArgument(f"trait value {v!r} contains a reserved character")
    return v


class TransitionLabeler:
    """Builds colored graphs for contexts and caches their canonical strings.

    The cache is keyed on the exact local encoding (node order: anchors first,
    then ascending id), so a hit is always the same colored graph.
    """

    def __init__(self, traits: Iterable[TraitSpec] = (), registry: LabelRegistry | None = None):
        traits = list(traits)
        self.node_specs = [t for t in traits if t.scope is Scope.NODE]
        self.edge_specs = [t for t in traits if t.scope is Scope.EDGE]
        self.registry = registry if registry is not None else LabelRegistry()
        self._cache: dict[tuple, str] = {}
        self._node_names = tuple(t.name for t in self.node_specs)
        self._edge_names = tuple(t.name for t in self.edge_specs)

    def colored_graph(self, g: Graph, s: Sequence[int], change: GraphChange) -> ColoredGraph:
        return self._build(g, self._local_order(s, change), change)

    @staticmethod
    def _local_order(s: Iterable[int], change: GraphChange) -> list[int]:
        anchors = list(dict.fromkeys(change.anchors))
        rest = sorted(set(s) - set(anchors))
        return anchors + rest

    def _node_values(self, g: Graph, order: list[int]) -> list[tuple]:
        cols: list[list[Any]] = [[] for _ in order]
        for spec in self.node_specs:
            store = g.node_traits.get(spec.name, {})
            vals = [store.get(v, spec.default) for v in order]
            if spec.kind is TraitKind.RANK:
                if any(x is None for x in vals):
                    raise InvalidArgument(f"missing rank trait {spec.name}")
                vals = rank_projection(vals)
            else:
                vals = [_class_value(x) for x in vals]
            for col, x in zip(cols, vals):
                col.append(_check_value(x))
        return [tuple(c) for c in cols]

    def _build(self, g: Graph, order: list[int], change: GraphChange) -> ColoredGraph:
        local = {v: i for i, v in enumerate(order)}
        marked_node = None if change.kind.is_edge else change.anchors[0]
        marked_edge = g.edge_key(*change.anchors) if change.kind.is_edge else None
        node_vals = self._node_values(g, order)
        node_colors = [(v == marked_node,) + node_vals[i] for i, v in enumerate(order)]
        raw_edges = []
        for u in order:
            for w in g.successors(u):
                if w in local and (g.directed or u < w):
                    raw_edges.append((u, w))
        edge_vals: list[list[Any]] = [[] for _ in raw_edges]
        for spec in self.edge_specs:
            store = g.edge_traits.get(spec.name, {})
            vals = [store.get(e, spec.default) for e in raw_edges]
            if spec.kind is TraitKind.RANK:
                if raw_edges and any(x is None for x in vals):
                    raise InvalidArgument(f"missing rank trait {spec.name}")
                vals = rank_projection(vals) if raw_edges else []
            else:
                vals = [_class_value(x) for x in vals]
            for col, x in zip(edge_vals, vals):
                col.append(_check_value(x))
        edges = {}
        for (u, w), vals in zip(raw_edges, edge_vals):
            i, j = local[u], local[w]
            if not g.directed and i > j:
                i, j = j, i
            edges[(i, j)] = ((u, w) == marked_edge,) + tuple(vals)
        return ColoredGraph(len(order), g.directed, node_colors, edges, change.kind,
                            self._node_names, self._edge_names)

    def string_for(self, g: Graph, s: Iterable[int], change: GraphChange) -> str:
        """Canonical string; ``g`` must be in the state where the changed element exists."""
        cg = self._build(g, self._local_order(s, change), change)
        key = (cg.kind, tuple(cg.node_colors), tuple(sorted(cg.edges.items())))
        h = self._cache.get(key)
        if h is None:
            h = canonical_string(cg)
            self._cache[key] = h
        return h

    def label(self, g: Graph, s: Iterable[int], change: GraphChange) -> SstLabel:
        h = self.string_for(g, s, change)
        return SstLabel(self.registry.intern(h), h)


def is_connected(g: Graph, s: Iterable[int]) -> bool:
    nodes = set(s)
    if not nodes:
        return False
    start = next(iter(nodes))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in g.neighbors(u):
            if w in nodes and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(nodes)


def element_present(g: Graph, change: GraphChange) -> bool:
    if change.kind.is_edge:
        return g.has_edge(*change.anchors)
    return change.anchors[0] in g


def label_transition(g: Graph, s: Iterable[int], change: GraphChange,
                     traits: Iterable[TraitSpec] = (),
                     labeler: TransitionLabeler | None = None) -> SstLabel:
    """Label one transition.

    For additions ``g`` may be given in either state; the change is applied
    temporarily if needed. Deletions are labeled in the state before deletion.
    """
    s = sorted(set(s))
    if len(s) > MAX_NODES:
        raise UnsupportedSize(f"{len(s)} nodes exceeds the {MAX_NODES}-node limit")
    if not set(change.anchors) <= set(s):
        raise InvalidArgument("context must contain every anchor node")
    labeler = labeler or TransitionLabeler(traits)
    applied = False
    if not element_present(g, change):
        if not change.kind.is_addition:
            raise InvalidArgument("deleted element is absent from the graph")
        g.apply(change)
        applied = True
    try:
        if not is_connected(g, s):
            raise InvalidContext("subgraph is not connected")
        return labeler.label(g, s, change)
    finally:
        if applied:
            g.revert(change)
