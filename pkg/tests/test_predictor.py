import csv
import itertools
import json
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import graphs, random_graph
from leakage import leakage_report
from sst.generators import barabasi_albert_stream
from sst.graph import Graph, GraphChange, InvalidArgument
from sst.io import bucket_stream
from sst.predictor import (StaticTrainConfig, TemporalTrainConfig, addition_vectors,
                           build_static_training_set, count_nonedges, interpret, run_static_lp,
                           run_temporal_lp, sample_nonedges, static_counter, to_dot,
                           train_temporal, write_interpretation, write_outputs)
from sst.svm import LinearModel


def from_networkx(h, directed=False):
    g = Graph(directed, range(h.number_of_nodes()))
    for u, v in h.edges():
        g.add_edge(u, v)
    return g


def test_sample_nonedges_basic():
    g = random_graph(random.Random(0), 30, 0.1, False)
    pairs = sample_nonedges(g, 50, seed=1)
    assert len(pairs) == len(set(pairs)) == 50
    assert pairs == sorted(pairs)
    assert all(u < v and not g.has_edge(u, v) for u, v in pairs)
    assert sample_nonedges(g, 50, seed=1) == pairs
    assert sample_nonedges(g, 50, seed=2) != pairs


def test_sample_nonedges_dense_regime_takes_all():
    g = Graph(True, range(4))
    g.add_edge(0, 1)
    every = sample_nonedges(g, count_nonedges(g), seed=0)
    assert len(every) == 11 and (0, 1) not in every and (1, 0) in every


def test_sample_nonedges_errors_and_pool():
    g = Graph(False, range(3))
    g.add_edge(0, 1)
    with pytest.raises(InvalidArgument):
        sample_nonedges(g, 3)
    assert sample_nonedges(g, 1, nodes=[1, 2]) == [(1, 2)]


@given(graphs(min_nodes=2, max_nodes=9), st.integers(0, 100))
def test_sample_nonedges_never_returns_edges(g, seed):
    n = count_nonedges(g)
    pairs = sample_nonedges(g, n // 2, seed)
    assert len(set(pairs)) == n // 2
    assert not any(g.has_edge(u, v) for u, v in pairs)


def test_present_edge_scored_as_just_added():
    g = from_networkx(nx.powerlaw_cluster_graph(40, 2, 0.5, seed=1))
    counter = static_counter(3, directed=False)
    for u, v in list(g.edges())[:10]:
        present = addition_vectors(g, [(u, v)], counter)[0]
        h = g.copy()
        h.remove_edge(u, v)
        explicit = addition_vectors(h, [(u, v)], counter)[0]
        assert present == explicit


def test_training_set_shape():
    g = from_networkx(nx.powerlaw_cluster_graph(60, 2, 0.3, seed=2))
    cfg = StaticTrainConfig(alpha=3, seed=4)
    ts = build_static_training_set(g, cfg)
    m = g.number_of_edges()
    assert ts.n_pos == m and len(ts.y) == 4 * m
    assert set(ts.pairs[m:]).isdisjoint(g.edges())


def path_labels():
    from sst.labeler import label_transition
    g = Graph(False, range(4))
    for i in range(3):
        g.add_edge(i, i + 1)
    return [label_transition(g, s, GraphChange.edge_deletion(1, 2)).H
            for s in ([1, 2], [0, 1, 2], [0, 1, 2, 3])]


A, B, C = path_labels()


def toy_model():
    return LinearModel([A, B, C], [0.5, -2.0, 1.0], 0.0, [0, 0, 0], [1, 1, 1],
                       {"occurrences": {"positive": [3, 1, 0], "negative": [0, 5, 2]}})


def test_interpret_orders_by_magnitude():
    rows = interpret(toy_model())
    assert [r.H for r in rows] == [B, C, A]
    assert rows[0].weight == pytest.approx(-2.0 / np.sqrt(5.25))
    assert (rows[0].positive_count, rows[0].negative_count) == (1, 5)


def test_interpret_order_stable_under_weight_scaling():
    m = toy_model()
    scaled = LinearModel(m.labels, m.weights * 7.5, 3.0, m.mean, m.scale, m.config)
    assert [r.H for r in interpret(m)] == [r.H for r in interpret(scaled)]
    assert [r.weight for r in interpret(m)] == pytest.approx([r.weight for r in interpret(scaled)])


def test_interpretation_csv_round_trip(tmp_path):
    rows = interpret(toy_model())
    write_interpretation(rows, tmp_path / "i.csv")
    with open(tmp_path / "i.csv") as fh:
        back = list(csv.DictReader(fh))
    assert [r["H"] for r in back] == [r.H for r in rows]
    assert [float(r["weight"]) for r in back] == pytest.approx([r.weight for r in rows], abs=1e-6)


def test_dot_marks_new_edge():
    g = Graph(True, range(3))
    g.add_edge(0, 1)
    g.add_edge(1, 2)
    from sst.labeler import label_transition
    h = label_transition(g, range(3), GraphChange.edge_addition(2, 0)).H
    dot = to_dot(h, "t")
    assert dot.startswith("digraph") and "color=red" in dot and dot.count("->") == 3


def test_config_validation():
    with pytest.raises(InvalidArgument):
        StaticTrainConfig(k=10)
    with pytest.raises(InvalidArgument):
        StaticTrainConfig(fractions=(0.5, 0.5, 0.5))
    with pytest.raises(InvalidArgument):
        TemporalTrainConfig(tau=10, base_buckets=9)
    with pytest.raises(InvalidArgument):
        TemporalTrainConfig(tau=2, base_buckets=1)


@pytest.fixture(scope="module")
def static_run():
    g = from_networkx(nx.powerlaw_cluster_graph(250, 3, 0.6, seed=7))
    return run_static_lp(g, StaticTrainConfig(k=3, alpha=5, seed=0, epochs=20), "plc")


def test_static_run_beats_random(static_run):
    rep = static_run.report
    assert rep.auc > 0.7
    assert 0 <= rep.aupr3 <= 1
    assert set(rep.baselines) == {"common_neighbors", "random"}
    assert abs(rep.baselines["random"]["auc"] - 0.5) < 0.1
    assert rep.auc_n_neg == 10 * rep.auc_n_pos


def test_static_run_reproducible(static_run):
    g = from_networkx(nx.powerlaw_cluster_graph(250, 3, 0.6, seed=7))
    again = run_static_lp(g, StaticTrainConfig(k=3, alpha=5, seed=0, epochs=20), "plc")
    a = json.loads(static_run.report.to_json())
    b = json.loads(again.report.to_json())
    a.pop("runtime_s")
    b.pop("runtime_s")
    assert a == b


def test_outputs_written(static_run, tmp_path):
    out = write_outputs(static_run, tmp_path / "run", top_dot=3)
    assert sorted(p.name for p in out.iterdir()) == \
        ["interpretation.csv", "model.json", "prcurve.csv", "report.json", "ssts"]
    assert len(list((out / "ssts").iterdir())) == 3
    model = LinearModel.load(out / "model.json")
    assert [r.H for r in interpret(model)] == [r.H for r in static_run.interpretation]


def test_tuning_picks_grid_value():
    g = from_networkx(nx.powerlaw_cluster_graph(150, 2, 0.5, seed=3))
    res = run_static_lp(g, StaticTrainConfig(alpha=3, epochs=10, tune_C=True, baselines=False))
    assert res.report.config["C_used"] in (0.1, 1.0, 10.0)
    assert res.report.baselines == {}


def test_directed_static_run():
    h = nx.gnp_random_graph(120, 0.04, seed=5, directed=True)
    g = from_networkx(h, directed=True)
    res = run_static_lp(g, StaticTrainConfig(alpha=3, epochs=10))
    assert res.report.config["directed"] is True
    assert all("|D|" in r.H for r in res.interpretation)


def test_temporal_features_do_not_leak():
    stream = barabasi_albert_stream(300, 2, seed=3)
    cfg = TemporalTrainConfig(epochs=5)
    assert leakage_report(bucket_stream(stream, cfg.tau), cfg, True) == []


def test_undirected_temporal_no_leak():
    rng = np.random.default_rng(0)
    edges = [(int(u), int(v), float(t)) for t, (u, v) in enumerate(rng.integers(0, 40, (600, 2))) if u != v]
    from sst.io import TemporalEdgeStream
    stream = TemporalEdgeStream(edges, directed=False)
    cfg = TemporalTrainConfig(epochs=5)
    assert leakage_report(bucket_stream(stream, cfg.tau), cfg, False) == []


def test_temporal_training_target():
    stream = barabasi_albert_stream(300, 2, seed=1)
    buckets = bucket_stream(stream, 10)
    _, ts = train_temporal(buckets, TemporalTrainConfig(epochs=5), True)
    assert ts.pairs[:ts.n_pos] == buckets[8].edges()
    assert len(ts.y) == 2 * ts.n_pos


def test_temporal_run_on_ba():
    res = run_temporal_lp(barabasi_albert_stream(400, 2, seed=2), TemporalTrainConfig(epochs=10))
    rep = res.report
    assert rep.mode == "temporal" and rep.auc > 0.7
    assert rep.config["interactions"] == 2 * 398
    top = res.interpretation[0]
    assert top.H.startswith("EA|D|3|") and "recency" in top.H
