import random

import pytest
from hypothesis import given, strategies as st

from conftest import random_graph
from exhaustive import EDGE_COLOR, NODE_COLOR, check, sampled_transitions, transitions
from sst.graph import Graph, GraphChange, InvalidArgument
from sst.labeler import (InvalidContext, LabelRegistry, TransitionLabeler, UnsupportedSize, decode,
                         describe, is_connected, label_transition)
from sst.traits import Scope, TraitKind, TraitSpec

RANK = TraitSpec("pagerank", TraitKind.RANK, Scope.NODE)


@pytest.mark.parametrize("n, directed, trait", [
    (2, False, None), (3, False, None), (4, False, None),
    (2, True, None), (3, True, None),
    (3, False, NODE_COLOR), (3, False, EDGE_COLOR), (3, True, NODE_COLOR),
])
def test_small_transitions_match_permutation_oracle(n, directed, trait):
    agreement = check(transitions(n, directed, trait), (trait,) if trait else ())
    assert agreement.mismatches == []


def test_known_class_counts():
    # undirected 3-node: 2 edge-change shapes on a path, 1 on a triangle; per kind
    assert check(transitions(3, False)).classes == 10
    assert check(transitions(2, False)).classes == 4


def test_sampled_directed_five_nodes():
    assert check(sampled_transitions(5, True, 300, seed=4), decode_every=3).mismatches == []


def relabel(g: Graph, perm: dict) -> Graph:
    h = Graph(g.directed, [perm[v] for v in g.nodes()])
    for u, v in g.edges():
        h.add_edge(perm[u], perm[v])
    for name, store in g.node_traits.items():
        for v, x in store.items():
            h.set_node_trait(name, perm[v], x)
    for name, store in g.edge_traits.items():
        for (u, v), x in store.items():
            h.set_edge_trait(name, perm[u], perm[v], x)
    return h


def test_permutation_invariance_random():
    rng = random.Random(11)
    labeler = TransitionLabeler([NODE_COLOR, EDGE_COLOR])
    done = 0
    while done < 1000:
        n = rng.randint(2, 8)
        g = random_graph(rng, n, 0.45, rng.random() < 0.5)
        if g.number_of_edges() == 0 or not is_connected(g, g.nodes()):
            continue
        for v in g.nodes():
            g.set_node_trait("color", v, rng.choice("ab"))
        for u, v in g.edges():
            g.set_edge_trait("tie", u, v, rng.choice("ab"))
        u, v = rng.choice(list(g.edges()))
        change = GraphChange.edge_deletion(u, v)
        target = list(range(n))
        rng.shuffle(target)
        perm = dict(zip(g.nodes(), target))
        h = relabel(g, perm)
        moved = GraphChange.edge_deletion(perm[u], perm[v])
        assert labeler.string_for(g, g.nodes(), change) == labeler.string_for(h, h.nodes(), moved)
        done += 1


def square(directed=False):
    g = Graph(directed, range(4))
    for i in range(4):
        g.add_edge(i, (i + 1) % 4)
    return g


def test_four_cycle_edges_equivalent():
    g = square()
    labels = {label_transition(g, range(4), GraphChange.edge_deletion(*e)).H for e in g.edges()}
    assert len(labels) == 1


def test_diagonal_differs_from_cycle_edge():
    g = square()
    diag = label_transition(g, range(4), GraphChange.edge_addition(0, 2))
    side = label_transition(g, range(4), GraphChange.edge_deletion(0, 1))
    assert diag.H != side.H
    assert decode(diag.H)["kind"] == "edge_addition"


def test_path_end_and_middle_edges_differ():
    g = Graph(False, range(4))
    for i in range(3):
        g.add_edge(i, i + 1)
    end = label_transition(g, range(4), GraphChange.edge_deletion(0, 1))
    mid = label_transition(g, range(4), GraphChange.edge_deletion(1, 2))
    assert end.H != mid.H


def test_directed_wedge_orientation_matters():
    out = Graph(True, range(3))
    out.add_edge(0, 1)
    out.add_edge(0, 2)
    chain = Graph(True, range(3))
    chain.add_edge(0, 1)
    chain.add_edge(2, 0)
    a = label_transition(out, range(3), GraphChange.edge_deletion(0, 1))
    b = label_transition(chain, range(3), GraphChange.edge_deletion(0, 1))
    assert a.H != b.H


def test_addition_applied_temporarily():
    g = Graph(False, range(3))
    g.add_edge(0, 1)
    before = g.serialize()
    lab = label_transition(g, [0, 1, 2], GraphChange.edge_addition(1, 2))
    assert g.serialize() == before
    info = decode(lab.H)
    assert sum(e["marked"] for e in info["edges"]) == 1 and len(info["edges"]) == 2


def test_rank_traits_only_relative_order_matters():
    g = Graph(False, range(3))
    g.add_edge(0, 1)
    g.add_edge(1, 2)
    h = g.copy()
    for v, (a, b) in enumerate([(0.5, 50), (0.2, 20), (0.01, 1)]):
        g.set_node_trait("pagerank", v, a)
        h.set_node_trait("pagerank", v, b)
    change = GraphChange.edge_deletion(0, 1)
    assert label_transition(g, range(3), change, [RANK]).H == label_transition(h, range(3), change, [RANK]).H
    h.set_node_trait("pagerank", 2, 100)
    assert label_transition(g, range(3), change, [RANK]).H != label_transition(h, range(3), change, [RANK]).H


def test_rank_projected_within_context_only():
    g = Graph(False, range(4))
    g.add_edge(0, 1)
    g.add_edge(1, 2)
    for v, x in enumerate([3, 2, 9, 1]):
        g.set_node_trait("pagerank", v, x)
    lab = label_transition(g, [0, 1], GraphChange.edge_deletion(0, 1), [RANK])
    assert sorted(n["traits"]["pagerank"] for n in decode(lab.H)["nodes"]) == ["1", "2"]


def test_class_traits_separate_labels():
    g = Graph(False, range(2))
    g.add_edge(0, 1)
    h = g.copy()
    h.set_node_trait("color", 0, "b")
    c = GraphChange.edge_deletion(0, 1)
    assert label_transition(g, [0, 1], c, [NODE_COLOR]).H != label_transition(h, [0, 1], c, [NODE_COLOR]).H


def test_too_many_nodes():
    g = Graph(False, range(10))
    for i in range(9):
        g.add_edge(i, i + 1)
    with pytest.raises(UnsupportedSize):
        label_transition(g, range(10), GraphChange.edge_deletion(0, 1))


def test_disconnected_context():
    g = Graph(False, range(4))
    g.add_edge(0, 1)
    g.add_edge(2, 3)
    with pytest.raises(InvalidContext):
        label_transition(g, range(4), GraphChange.edge_deletion(0, 1))


def test_context_must_hold_anchors():
    g = square()
    with pytest.raises(InvalidArgument):
        label_transition(g, [0, 1], GraphChange.edge_deletion(2, 3))


def test_reserved_characters_rejected():
    g = Graph(False, range(2))
    g.add_edge(0, 1)
    g.set_node_trait("color", 0, "a|b")
    with pytest.raises(InvalidArgument):
        label_transition(g, [0, 1], GraphChange.edge_deletion(0, 1), [NODE_COLOR])


def test_registry_ids_dense_and_stable():
    reg = LabelRegistry()
    assert [reg.intern(h) for h in ["x", "y", "x", "z"]] == [0, 1, 0, 2]
    assert reg.string(1) == "y" and len(reg) == 3
    assert LabelRegistry(reg.strings()).get("z") == 2


def test_describe_mentions_new_edge():
    g = square(directed=True)
    lab = label_transition(g, range(4), GraphChange.edge_addition(0, 2))
    assert "NEW" in describe(lab.H) and "->" in describe(lab.H)


@given(st.integers(0, 10_000))
def test_labels_depend_only_on_context(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 7, 0.5, False)
    edges = list(g.edges())
    if not edges:
        return
    u, v = rng.choice(edges)
    s = {u, v} | set(rng.sample(g.nodes(), 2))
    if not is_connected(g, s):
        return
    h = g.copy()
    for x in h.nodes():
        if x not in s:
            h.remove_node(x)
    c = GraphChange.edge_deletion(u, v)
    assert label_transition(g, s, c).H == label_transition(h, s, c).H
