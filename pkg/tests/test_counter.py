import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from conftest import graphs, random_graph
from exhaustive import counter_cases, label_forms, random_change
from oracles import brute_contexts, brute_sst_counts
from sst.counter import (CounterConfig, TransitionCounter, context_strings, count_transitions,
                         enumerate_contexts)
from sst.graph import ChangeKind, Graph, GraphChange, InvalidArgument
from sst.labeler import LabelRegistry, TransitionLabeler
from sst.traits import DegreeComparison


def triangle():
    g = Graph(False, range(3))
    for u, v in [(0, 1), (1, 2), (0, 2)]:
        g.add_edge(u, v)
    return g


def star(n_leaves):
    g = Graph(False, range(n_leaves + 1))
    for i in range(1, n_leaves + 1):
        g.add_edge(0, i)
    return g


def test_triangle_edge_has_one_context():
    vec = count_transitions(triangle(), GraphChange.edge_deletion(0, 1), CounterConfig(k=3))
    assert vec.total == 1 and list(vec.counts.values()) == [1]


def test_star_center_deletion_contexts():
    # center plus any 2 of 5 leaves
    contexts = list(enumerate_contexts(star(5), [0], 3))
    assert len(contexts) == 10


def test_no_contexts_for_isolated_pair():
    g = Graph(False, range(4))
    g.add_edge(2, 3)
    vec = count_transitions(g, GraphChange.edge_addition(0, 1), CounterConfig(k=3))
    assert vec.total == 0 and vec.counts == {}


def test_wedge_closure():
    g = Graph(False, range(3))
    g.add_edge(0, 1)
    g.add_edge(1, 2)
    vec = count_transitions(g, GraphChange.edge_addition(0, 2), CounterConfig(k=3))
    assert vec.total == 1
    assert g.number_of_edges() == 2


def test_k_equal_to_anchor_count():
    vec = count_transitions(triangle(), GraphChange.edge_deletion(0, 1), CounterConfig(k=2))
    assert vec.total == 1


def test_bad_k():
    with pytest.raises(InvalidArgument):
        CounterConfig(k=1)
    with pytest.raises(InvalidArgument):
        CounterConfig(k=10)


def test_disabled_kind():
    cfg = CounterConfig(k=3, kinds=(ChangeKind.EDGE_ADDITION,))
    with pytest.raises(InvalidArgument):
        count_transitions(triangle(), GraphChange.edge_deletion(0, 1), cfg)


def test_binary_tree_node_addition_distinct_from_edges():
    g = Graph(False, range(7))
    for i in range(1, 7):
        g.add_edge(i, (i - 1) // 2)
    reg = LabelRegistry()
    lab = TransitionLabeler((), reg)
    cfg = CounterConfig(k=3)
    node = count_transitions(g, GraphChange.node_addition(7, [(7, 3)]), cfg, lab)
    edge = count_transitions(g, GraphChange.edge_addition(3, 4), cfg, lab)
    assert node.total > 0 and edge.total > 0
    assert set(node.counts).isdisjoint(edge.counts)


def test_er_graph_against_subset_filter():
    rng = random.Random(5)
    g = random_graph(rng, 12, 0.3, False)
    for u, v in list(g.edges())[:15]:
        change = GraphChange.edge_deletion(u, v)
        strings = context_strings(g, change, 4, TransitionLabeler())
        assert label_forms(strings) == brute_sst_counts(g, change, 4)


@pytest.mark.parametrize("seed", range(8))
def test_random_changes_match_oracle(seed):
    for g, change, k in counter_cases(10, seed, max_nodes=8):
        strings = context_strings(g, change, k, TransitionLabeler())
        assert label_forms(strings) == brute_sst_counts(g, change, k)


@given(graphs(min_nodes=2, max_nodes=9), st.integers(2, 5), st.data())
def test_contexts_match_subset_filter(g, k, data):
    anchors = data.draw(st.sampled_from(
        [(v,) for v in g.nodes()] + [e for e in g.edges()]))
    if k < len(anchors):
        return
    got = list(enumerate_contexts(g, anchors, k))
    assert len(got) == len(set(got))
    assert set(got) == set(brute_contexts(g, anchors, k))


@given(graphs(min_nodes=3, max_nodes=8, directed=False), st.integers(3, 4))
def test_undirected_endpoint_order_irrelevant(g, k):
    pairs = [(u, v) for u, v in itertools.combinations(g.nodes(), 2) if not g.has_edge(u, v)]
    if not pairs:
        return
    u, v = pairs[0]
    lab = TransitionLabeler()
    a = context_strings(g, GraphChange.edge_addition(u, v), k, lab)
    b = context_strings(g, GraphChange.edge_addition(v, u), k, lab)
    assert a == b


@given(graphs(min_nodes=3, max_nodes=8), st.integers(3, 4), st.integers(0, 1000))
def test_add_then_delete_same_contexts(g, k, seed):
    rng = random.Random(seed)
    change = random_change(g, rng)
    if change is None or change.kind is not ChangeKind.EDGE_ADDITION:
        return
    lab = TransitionLabeler()
    before = g.serialize()
    added = context_strings(g, change, k, lab)
    assert g.serialize() == before
    g.apply(change)
    deleted = context_strings(g, GraphChange.edge_deletion(*change.anchors), k, lab)
    # same colored graphs, only the kind prefix differs
    assert Counter({h[2:]: c for h, c in added.items()}) == Counter({h[2:]: c for h, c in deleted.items()})


@given(graphs(min_nodes=3, max_nodes=8), st.integers(0, 1000))
def test_graph_restored_after_counting(g, seed):
    change = random_change(g, random.Random(seed))
    if change is None:
        return
    before = g.serialize()
    count_transitions(g, change, CounterConfig(k=3))
    assert g.serialize() == before


def test_counter_hooks_run_around_each_change():
    g = star(3)
    g.add_node(9)
    counter = TransitionCounter(CounterConfig(k=3, updaters=(DegreeComparison(),)))
    counter.begin(g)
    vec = counter.count(g, GraphChange.edge_addition(0, 9))
    counter.end(g)
    # the new edge joins 9 to the center; one context per leaf
    assert vec.total == 3 and len(vec.counts) == 1
    h = counter.registry.string(next(iter(vec.counts)))
    assert h.split("|")[3] == "deg_cmp"
    assert "[higher]" in h and "[lesser]" in h
    assert g.node_traits.get("deg_cmp", {}) == {}


def test_count_many_threads_match_serial():
    rng = random.Random(2)
    g = random_graph(rng, 40, 0.1, True)
    pairs = [(u, v) for u, v in itertools.permutations(g.nodes(), 2) if not g.has_edge(u, v)][:150]
    changes = [GraphChange.edge_addition(u, v) for u, v in pairs]
    counter = TransitionCounter(CounterConfig(k=3))
    assert counter.count_many(g, changes, threads=1) == counter.count_many(g, changes, threads=3)


def test_vector_json():
    reg = LabelRegistry()
    vec = count_transitions(triangle(), GraphChange.edge_deletion(0, 1), CounterConfig(k=3),
                            TransitionLabeler((), reg))
    out = vec.to_json(reg)
    assert out["total"] == 1 and out["entries"][0]["H"].startswith("ED|U|3")
