import gzip
import io

import pytest
from hypothesis import given, strategies as st

from conftest import random_graph
from sst.graph import Graph, InvalidArgument
from sst.io import (LoadStats, ParseError, TemporalEdgeStream, bucket_sizes, bucket_stream,
                    graph_from_edges, load_static, load_temporal, split_static, write_static,
                    write_temporal)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_static_dedupes_and_drops_loops(tmp_path):
    p = write(tmp_path, "g.txt", "# header\n% other comment\na b\nb a\nc c\nb\tc\n\na,b\n")
    stats = LoadStats()
    g = load_static(p, directed=False, stats=stats)
    assert len(g) == 3 and g.number_of_edges() == 2
    assert (stats.lines, stats.self_loops, stats.duplicates) == (5, 1, 2)
    assert g.labels == {0: "a", 1: "b", 2: "c"}


def test_load_static_directed_keeps_reciprocal(tmp_path):
    g = load_static(write(tmp_path, "g.txt", "1 2\n2 1\n"), directed=True)
    assert g.number_of_edges() == 2


def test_load_static_gzip(tmp_path):
    p = tmp_path / "g.txt.gz"
    with gzip.open(p, "wt") as fh:
        fh.write("0 1\n1 2\n")
    assert load_static(p).number_of_edges() == 2


def test_parse_error_has_line(tmp_path):
    with pytest.raises(ParseError, match="line 2"):
        load_static(write(tmp_path, "g.txt", "0 1\n7\n"))


def test_static_round_trip(tmp_path):
    import random
    g = random_graph(random.Random(1), 15, 0.3, True)
    p = tmp_path / "out.txt"
    write_static(g, p)
    h = load_static(p, directed=True)
    assert sorted((h.labels[u], h.labels[v]) for u, v in h.edges()) == \
        sorted((str(u), str(v)) for u, v in g.edges())


def test_load_temporal_sorts_stably():
    text = "x y 5\ny z 1\nz x 1\n"
    s = load_temporal(io.StringIO(text))
    assert [(s.labels[u], s.labels[v], t) for u, v, t in s.edges] == \
        [("y", "z", 1.0), ("z", "x", 1.0), ("x", "y", 5.0)]


def test_load_temporal_errors():
    with pytest.raises(ParseError, match="missing timestamp"):
        load_temporal(io.StringIO("1 2\n"))
    with pytest.raises(ParseError, match="bad timestamp"):
        load_temporal(io.StringIO("1 2 soon\n"))


def test_temporal_round_trip():
    s = TemporalEdgeStream([(0, 1, 1.0), (1, 2, 2.5), (2, 0, 3.0)])
    buf = io.StringIO()
    write_temporal(s, buf)
    assert buf.getvalue() == "0 1 1\n1 2 2.5\n2 0 3\n"
    back = load_temporal(io.StringIO(buf.getvalue()))
    assert [(back.labels[u], back.labels[v], t) for u, v, t in back.edges] == \
        [("0", "1", 1.0), ("1", "2", 2.5), ("2", "0", 3.0)]


def test_bucket_sizes_example():
    assert bucket_sizes(23, 10) == [3, 3, 3, 2, 2, 2, 2, 2, 2, 2]


@given(st.integers(1, 10_000), st.integers(1, 50))
def test_bucket_sizes_partition(n, tau):
    sizes = bucket_sizes(n, tau)
    assert sum(sizes) == n and max(sizes) - min(sizes) <= 1
    assert sizes == sorted(sizes, reverse=True)


def test_bucket_stream_weights():
    s = TemporalEdgeStream([(0, 1, 1), (0, 1, 2), (1, 1, 3), (1, 0, 4), (2, 0, 5), (0, 2, 6)],
                           directed=False)
    b = bucket_stream(s, 2)
    assert [x.index for x in b] == [1, 2]
    assert b[0].weights == {(0, 1): 2}
    assert b[1].weights == {(0, 1): 1, (0, 2): 2}


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=10, max_size=80),
       st.integers(1, 10))
def test_bucket_stream_preserves_interactions(pairs, tau):
    s = TemporalEdgeStream([(u, v, float(i)) for i, (u, v) in enumerate(pairs)])
    buckets = bucket_stream(s, tau)
    assert len(buckets) == tau
    assert sum(sum(b.weights.values()) for b in buckets) == sum(u != v for u, v in pairs)


def test_bucket_stream_too_short():
    with pytest.raises(InvalidArgument):
        bucket_stream(TemporalEdgeStream([(0, 1, 0.0)]), 2)


def test_split_sizes_and_disjoint():
    import random
    g = random_graph(random.Random(0), 40, 0.2, False)
    train, val, test = split_static(g, seed=3)
    m = g.number_of_edges()
    assert len(val) == round(0.05 * m) and len(test) == round(0.10 * m)
    assert sorted(train + val + test) == list(g.edges())
    assert split_static(g, seed=3) == (train, val, test)
    assert split_static(g, seed=4) != (train, val, test)


def test_split_errors():
    g = graph_from_edges(range(3), [(0, 1), (1, 2)], False)
    with pytest.raises(InvalidArgument):
        split_static(g)  # two edges leave validation and test empty
    with pytest.raises(InvalidArgument):
        split_static(g, (0.5, 0.5))


def test_graph_from_edges_keeps_isolated_nodes():
    g = graph_from_edges(range(5), [(0, 1)], True)
    assert len(g) == 5 and isinstance(g, Graph)
