"""Static and temporal SST link predictors, evaluation and interpretation."""

from __future__ import annotations

import csv
import json
import logging
import subprocess
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .counter import CounterConfig, TransitionCounter
from .graph import ChangeKind, Graph, GraphChange, InvalidArgument
from .io import Bucket, TemporalEdgeStream, bucket_stream, graph_from_edges, split_static
from .labeler import MAX_NODES, LabelRegistry, decode, describe
from .metrics import PrCurve, auc, aupr3_candidates, aupr_davis_goadrich, score_pairs
from .svm import LinearModel, SvmConfig, counters_to_matrix, feature_index, svm_train
from .traits import DegreeComparison, EdgeHistory, TemporalTraits

log = logging.getLogger(__name__)

Pair = tuple[int, int]


def _check_k(k: int) -> None:
    if not 2 <= k <= MAX_NODES:
        raise InvalidArgument(f"k must be in [2, {MAX_NODES}], got {k}")


@dataclass
class StaticTrainConfig:
    k: int = 3
    alpha: int = 10  # sampled non-edges per training edge
    seed: int = 0
    fractions: tuple[float, float, float] = (0.85, 0.05, 0.10)
    C: float = 1.0
    epochs: int = 50
    tune_C: bool = False  # pick C on the validation split
    C_grid: tuple[float, ...] = (0.1, 1.0, 10.0)
    auc_negative_ratio: int = 10
    hops: int = 3
    directed_distance: bool = False
    baselines: bool = True
    threads: int = 1

    def __post_init__(self):
        self.fractions = tuple(float(f) for f in self.fractions)
        self.C_grid = tuple(float(c) for c in self.C_grid)
        _check_k(self.k)
        if self.alpha < 1:
            raise InvalidArgument("alpha must be at least 1")
        if len(self.fractions) != 3 or abs(sum(self.fractions) - 1) > 1e-9:
            raise InvalidArgument(f"fractions {self.fractions} must sum to 1")
        if self.auc_negative_ratio < 1 or self.hops < 1:
            raise InvalidArgument("auc_negative_ratio and hops must be positive")


@dataclass
class TemporalTrainConfig:
    k: int = 3
    tau: int = 10
    base_buckets: int = 8
    seed: int = 0
    C: float = 1.0
    epochs: int = 50
    auc_negative_ratio: int = 10
    hops: int = 3
    directed_distance: bool = False
    baselines: bool = True
    threads: int = 1

    def __post_init__(self):
        _check_k(self.k)
        if self.tau < 3:
            raise InvalidArgument("tau must be at least 3")
        if not 1 <= self.base_buckets < self.tau - 1:
            raise InvalidArgument(f"base_buckets must be in [1, {self.tau - 2}]")
        if self.auc_negative_ratio < 1 or self.hops < 1:
            raise InvalidArgument("auc_negative_ratio and hops must be positive")


# -- sampling -----------------------------------------------------------------


def _pair(g: Graph, u: int, v: int) -> Pair:
    return (u, v) if g.directed or u < v else (v, u)


def count_nonedges(g: Graph, nodes: Sequence[int] | None = None) -> int:
    nodes = g.nodes() if nodes is None else nodes
    n = len(nodes)
    pairs = n * (n - 1) if g.directed else n * (n - 1) // 2
    inside = set(nodes)
    m = sum(1 for u, v in g.edges() if u in inside and v in inside)
    return pairs - m


def sample_nonedges(g: Graph, count: int, seed: int = 0,
                    nodes: Sequence[int] | None = None) -> list[Pair]:
    """Uniform sample of ``count`` distinct non-adjacent pairs, sorted.

    Undirected pairs come back as ``(min, max)``. ``nodes`` restricts the pool.
    """
    nodes = np.array(sorted(g.nodes() if nodes is None else nodes), dtype=np.int64)
    available = count_nonedges(g, nodes.tolist())
    if count < 0 or count > available:
        raise InvalidArgument(f"cannot sample {count} non-edges; only {available} exist")
    rng = np.random.default_rng(seed)
    if count == 0:
        return []
    if count * 3 > available:
        # dense regime: enumerate and choose
        every = [(int(u), int(v)) for u in nodes for v in nodes
                 if u != v and (g.directed or u < v) and not g.has_edge(int(u), int(v))]
        pick = rng.choice(len(every), size=count, replace=False)
        return sorted(every[i] for i in pick)
    chosen: set[Pair] = set()
    order: list[Pair] = []
    while len(order) < count:
        draw = rng.integers(len(nodes), size=(2 * (count - len(order)) + 16, 2))
        for i, j in draw:
            if i == j:
                continue
            u, v = _pair(g, int(nodes[i]), int(nodes[j]))
            if (u, v) in chosen or g.has_edge(u, v):
                continue
            chosen.add((u, v))
            order.append((u, v))
            if len(order) == count:
                break
    return sorted(order)


# -- features -----------------------------------------------------------------


def addition_vectors(g: Graph, pairs: Sequence[Pair], counter: TransitionCounter,
                     threads: int = 1) -> list[Counter]:
    """SST string counts for adding each pair to ``g``.

    A pair already present in ``g`` is taken as just added: ``g`` is its
    after-state and ``g`` minus the edge its before-state.
    """
    counter.begin(g)
    try:
        return counter.count_many(g, [GraphChange.edge_addition(u, v) for u, v in pairs], threads)
    finally:
        counter.end(g)


def static_counter(k: int, directed: bool) -> TransitionCounter:
    updaters = () if directed else (DegreeComparison(),)
    return TransitionCounter(CounterConfig(k=k, kinds=(ChangeKind.EDGE_ADDITION,), updaters=updaters))


@dataclass
class TrainingSet:
    pairs: list[Pair]
    rows: list[Counter]
    y: np.ndarray

    @property
    def n_pos(self) -> int:
        return int((self.y > 0).sum())

    def matrix(self):
        labels = feature_index(self.rows)
        return labels, counters_to_matrix(self.rows, {h: i for i, h in enumerate(labels)})


def build_static_training_set(g_train: Graph, cfg: StaticTrainConfig,
                              counter: TransitionCounter | None = None) -> TrainingSet:
    """Every training edge (as if just added) plus ``alpha`` times as many non-edges."""
    counter = counter or static_counter(cfg.k, g_train.directed)
    positives = list(g_train.edges())
    negatives = sample_nonedges(g_train, cfg.alpha * len(positives), cfg.seed)
    pairs = positives + negatives
    rows = addition_vectors(g_train, pairs, counter, cfg.threads)
    y = np.r_[np.ones(len(positives)), -np.ones(len(negatives))]
    return TrainingSet(pairs, rows, y)


def fit(ts: TrainingSet, C: float, epochs: int, seed: int) -> LinearModel:
    labels, x = ts.matrix()
    model = svm_train(x, ts.y, SvmConfig(C=C, epochs=epochs, seed=seed), labels)
    pos = np.asarray(x[ts.y > 0].sum(axis=0)).ravel()
    neg = np.asarray(x[ts.y < 0].sum(axis=0)).ravel()
    model.config["occurrences"] = {"positive": pos.astype(int).tolist(),
                                   "negative": neg.astype(int).tolist()}
    return model


# -- interpretation -----------------------------------------------------------


@dataclass
class InterpretationRow:
    rank: int
    label_id: int
    weight: float
    H: str
    decode: str
    positive_count: int
    negative_count: int


def interpret(model: LinearModel, registry: LabelRegistry | None = None) -> list[InterpretationRow]:
    """SSTs by decreasing magnitude of the unit-normalized weight.

    Positive weight means the transition makes an edge more likely to be real.
    """
    unit = model.unit_weights()
    occ = model.config.get("occurrences", {})
    pos = occ.get("positive", [0] * len(unit))
    neg = occ.get("negative", [0] * len(unit))
    order = sorted(range(len(unit)), key=lambda i: (-abs(unit[i]), model.labels[i]))
    rows = []
    for rank, i in enumerate(order, 1):
        h = model.labels[i]
        label_id = registry.intern(h) if registry is not None else i
        rows.append(InterpretationRow(rank, label_id, float(unit[i]), h, describe(h),
                                      int(pos[i]), int(neg[i])))
    return rows


def write_interpretation(rows: Sequence[InterpretationRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rank", "label_id", "weight", "H", "decode", "positive_count", "negative_count"])
        for r in rows:
            w.writerow([r.rank, r.label_id, f"{r.weight:.6f}", r.H, r.decode,
                        r.positive_count, r.negative_count])


def to_dot(h: str, title: str = "") -> str:
    """Graphviz rendering of one label; the changed element is drawn in red."""
    info = decode(h)
    kind = "digraph" if info["directed"] else "graph"
    arrow = "->" if info["directed"] else "--"
    lines = [f"{kind} sst {{"]
    if title:
        lines.append(f'  label="{title}";')
    for i, node in enumerate(info["nodes"]):
        extra = "\\n".join(f"{k}={v}" for k, v in node["traits"].items())
        text = f"{i}\\n{extra}" if extra else str(i)
        color = ', color=red' if node["marked"] else ""
        lines.append(f'  n{i} [label="{text}"{color}];')
    for e in info["edges"]:
        attrs = []
        if e["marked"]:
            attrs.append("color=red, style=dashed")
        if e["traits"]:
            attrs.append('label="' + ",".join(e["traits"].values()) + '"')
        tail = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  n{e['src']} {arrow} n{e['dst']}{tail};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- reports ------------------------------------------------------------------


def version_string() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             cwd=Path(__file__).resolve().parent, capture_output=True,
                             text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


@dataclass
class EvaluationReport:
    dataset: str
    mode: str
    k: int
    seed: int
    auc: float
    aupr3: float
    n_pos: int
    n_neg: int
    runtime_s: float
    config: dict
    version: str = field(default_factory=version_string)
    auc_n_pos: int = 0
    auc_n_neg: int = 0
    n_train: int = 0
    baselines: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)


@dataclass
class RunResult:
    report: EvaluationReport
    model: LinearModel
    interpretation: list[InterpretationRow]
    curve: PrCurve
    training: TrainingSet | None = None


def _evaluate(g_feat: Graph, counter: TransitionCounter, model: LinearModel,
              positives: list[Pair], g_eval: Graph, auc_negs: list[Pair], cfg,
              score_graph: Graph) -> tuple[dict, PrCurve]:
    """Scores the AUC set (all positives vs sampled negatives) and the 3-hop set."""
    cand = aupr3_candidates(g_eval, positives, cfg.hops, cfg.directed_distance)
    pairs = sorted(set(positives) | set(auc_negs) | set(cand.pairs))
    rows = addition_vectors(g_feat, pairs, counter, cfg.threads)
    score = dict(zip(pairs, model.decision(rows)))

    auc_pairs = positives + auc_negs
    auc_truth = np.r_[np.ones(len(positives)), np.zeros(len(auc_negs))]
    out = {
        "auc": auc([score[p] for p in auc_pairs], auc_truth),
        "n_pos": cand.n_pos, "n_neg": cand.n_neg,
        "auc_n_pos": len(positives), "auc_n_neg": len(auc_negs),
    }
    curve = aupr_davis_goadrich([score[p] for p in cand.pairs], cand.truth) if cand.n_pos else None
    out["aupr3"] = curve.area if curve else float("nan")
    if cfg.baselines:
        out["baselines"] = baseline_metrics(score_graph, auc_pairs, auc_truth, cand, cfg.seed)
    return out, curve


def baseline_metrics(g: Graph, auc_pairs: list[Pair], auc_truth: np.ndarray,
                     cand, seed: int) -> dict:
    """Common-neighbors and random scores on the same evaluation sets."""
    out = {}
    for method in ("common_neighbors", "random"):
        s_auc = score_pairs(g, auc_pairs, method, seed)
        s_cand = score_pairs(g, cand.pairs, method, seed + 1)
        out[method] = {
            "auc": auc(s_auc, auc_truth),
            "aupr3": aupr_davis_goadrich(s_cand, cand.truth).area if cand.n_pos else float("nan"),
        }
    return out


def static_baselines(g: Graph, cfg: StaticTrainConfig) -> dict:
    """Baselines alone, on the evaluation sets ``run_static_lp`` would use."""
    _, _, test = split_static(g, cfg.fractions, cfg.seed)
    auc_negs = sample_nonedges(g, cfg.auc_negative_ratio * len(test), cfg.seed + 1)
    cand = aupr3_candidates(g, test, cfg.hops, cfg.directed_distance)
    truth = np.r_[np.ones(len(test)), np.zeros(len(auc_negs))]
    return baseline_metrics(g, list(test) + auc_negs, truth, cand, cfg.seed)


def temporal_baselines(stream: TemporalEdgeStream, cfg: TemporalTrainConfig) -> dict:
    buckets = bucket_stream(stream, cfg.tau)
    phase = temporal_phase(buckets[:-1], buckets[-1], cfg.k, stream.directed)
    test_pos = buckets[-1].edges()
    g_eval = _union(phase.base, test_pos)
    auc_negs = sample_nonedges(g_eval, cfg.auc_negative_ratio * len(test_pos), cfg.seed + 1)
    cand = aupr3_candidates(g_eval, test_pos, cfg.hops, cfg.directed_distance)
    truth = np.r_[np.ones(len(test_pos)), np.zeros(len(auc_negs))]
    return baseline_metrics(phase.base, test_pos + auc_negs, truth, cand, cfg.seed)


def run_static_lp(g: Graph, cfg: StaticTrainConfig, dataset: str = "graph") -> RunResult:
    """Split, train on the training edges, evaluate on the held-out test edges.

    Test edges are scored on the full graph, each as if just added; candidate
    non-edges are scored on the full graph as is.
    """
    start = time.perf_counter()
    train, val, test = split_static(g, cfg.fractions, cfg.seed)
    if not test:
        raise InvalidArgument("test split is empty")
    g_train = graph_from_edges(g.nodes(), train, g.directed)
    counter = static_counter(cfg.k, g.directed)
    ts = build_static_training_set(g_train, cfg, counter)
    if len(set(ts.y)) < 2:
        raise InvalidArgument("training split has no edges")

    C = cfg.C
    if cfg.tune_C and val:
        C = _tune_C(g, g_train, train, val, ts, counter, cfg)
    model = fit(ts, C, cfg.epochs, cfg.seed)

    auc_negs = sample_nonedges(g, cfg.auc_negative_ratio * len(test), cfg.seed + 1)
    metrics, curve = _evaluate(g, counter, model, test, g, auc_negs, cfg, g)
    report = EvaluationReport(
        dataset=dataset, mode="static", k=cfg.k, seed=cfg.seed,
        auc=metrics["auc"], aupr3=metrics["aupr3"], n_pos=metrics["n_pos"], n_neg=metrics["n_neg"],
        runtime_s=time.perf_counter() - start,
        config={**_config_echo(cfg), "C_used": C, "directed": g.directed},
        auc_n_pos=metrics["auc_n_pos"], auc_n_neg=metrics["auc_n_neg"], n_train=len(ts.y),
        baselines=metrics.get("baselines", {}),
    )
    return RunResult(report, model, interpret(model), curve, ts)


def _tune_C(g, g_train, train, val, ts, counter, cfg) -> float:
    g_val = graph_from_edges(g.nodes(), list(train) + list(val), g.directed)
    negs = sample_nonedges(g, cfg.alpha * len(val), cfg.seed + 2)
    rows = addition_vectors(g_val, list(val) + negs, counter, cfg.threads)
    truth = np.r_[np.ones(len(val)), np.zeros(len(negs))]
    best = (-1.0, cfg.C)
    for C in cfg.C_grid:
        model = fit(ts, C, cfg.epochs, cfg.seed)
        score = auc(model.decision(rows), truth)
        log.info("validation C=%g auc=%.4f", C, score)
        if score > best[0] + 1e-12:
            best = (score, C)
    return best[1]


def _config_echo(cfg) -> dict:
    out = asdict(cfg)
    out.pop("threads", None)
    return {k: list(v) if isinstance(v, tuple) else v for k, v in out.items()}


# -- temporal -----------------------------------------------------------------


def edge_history(buckets: Sequence[Bucket], directed: bool) -> EdgeHistory:
    hist = EdgeHistory(directed)
    for b in buckets:
        for u, v in b.edges():
            hist.record(u, v, b.index)
    return hist


@dataclass
class TemporalPhase:
    """Feature context for predicting bucket ``target`` from the buckets before it."""

    target: int
    base: Graph
    counter: TransitionCounter
    universe: list[int]


def temporal_phase(history_buckets: Sequence[Bucket], target: Bucket, k: int,
                   directed: bool) -> TemporalPhase:
    """Base graph and trait updater for bucket ``target``.

    Only ``history_buckets`` (all strictly earlier than ``target``) shape the
    features; ``target`` contributes its node ids so new nodes can be scored.
    """
    if any(b.index >= target.index for b in history_buckets):
        raise InvalidArgument("history buckets must precede the target bucket")
    universe = sorted({x for b in (*history_buckets, target) for e in b.weights for x in e})
    base_edges = sorted({e for b in history_buckets for e in b.weights})
    base = graph_from_edges(universe, base_edges, directed)
    traits = TemporalTraits(edge_history(history_buckets, directed), target.index)
    assert (traits.history.latest_bucket() or 0) < target.index
    counter = TransitionCounter(CounterConfig(k=k, kinds=(ChangeKind.EDGE_ADDITION,), updaters=(traits,)))
    return TemporalPhase(target.index, base, counter, universe)


def temporal_vectors(phase: TemporalPhase, pairs: Sequence[Pair], threads: int = 1) -> list[Counter]:
    return addition_vectors(phase.base, pairs, phase.counter, threads)


def _union(g: Graph, edges) -> Graph:
    out = g.copy()
    for u, v in edges:
        if not out.has_edge(u, v):
            out.add_edge(u, v)
    return out


def train_temporal(buckets: Sequence[Bucket], cfg: TemporalTrainConfig,
                   directed: bool) -> tuple[LinearModel, TrainingSet]:
    """Fit on bucket ``base_buckets + 1`` over the base graph of the buckets before it.

    Negatives are non-edges of base plus target edges, drawn from the nodes
    seen up to and including the target bucket.
    """
    target = buckets[cfg.base_buckets]
    phase = temporal_phase(buckets[:cfg.base_buckets], target, cfg.k, directed)
    positives = target.edges()
    if not positives:
        raise InvalidArgument("training bucket holds no edges")
    negatives = sample_nonedges(_union(phase.base, positives), len(positives), cfg.seed)
    pairs = positives + negatives
    rows = temporal_vectors(phase, pairs, cfg.threads)
    ts = TrainingSet(pairs, rows, np.r_[np.ones(len(positives)), -np.ones(len(negatives))])
    return fit(ts, cfg.C, cfg.epochs, cfg.seed), ts


def run_temporal_lp(stream: TemporalEdgeStream, cfg: TemporalTrainConfig,
                    dataset: str = "stream") -> RunResult:
    """Bucket the stream, train (see ``train_temporal``), then test on the last
    bucket over all earlier ones. Bucket weights are ignored."""
    start = time.perf_counter()
    buckets = bucket_stream(stream, cfg.tau)
    directed = stream.directed
    model, ts = train_temporal(buckets, cfg, directed)

    test_target = buckets[-1]
    test_phase = temporal_phase(buckets[:-1], test_target, cfg.k, directed)
    test_pos = test_target.edges()
    if not test_pos:
        raise InvalidArgument("test bucket holds no edges")
    g_eval = _union(test_phase.base, test_pos)
    auc_negs = sample_nonedges(g_eval, cfg.auc_negative_ratio * len(test_pos), cfg.seed + 1)
    metrics, curve = _evaluate(test_phase.base, test_phase.counter, model, test_pos, g_eval,
                               auc_negs, cfg, test_phase.base)
    report = EvaluationReport(
        dataset=dataset, mode="temporal", k=cfg.k, seed=cfg.seed,
        auc=metrics["auc"], aupr3=metrics["aupr3"], n_pos=metrics["n_pos"], n_neg=metrics["n_neg"],
        runtime_s=time.perf_counter() - start,
        config={**_config_echo(cfg), "directed": directed, "interactions": len(stream)},
        auc_n_pos=metrics["auc_n_pos"], auc_n_neg=metrics["auc_n_neg"], n_train=len(ts.y),
        baselines=metrics.get("baselines", {}),
    )
    return RunResult(report, model, interpret(model), curve, ts)


def write_outputs(result: RunResult, out_dir, top_dot: int = 12) -> Path:
    """report.json, interpretation.csv, prcurve.csv, model.json and ssts/*.dot."""
    out = Path(out_dir)
    (out / "ssts").mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(result.report.to_json() + "\n")
    write_interpretation(result.interpretation, out / "interpretation.csv")
    result.model.save(out / "model.json")
    with open(out / "prcurve.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["recall", "precision"])
        if result.curve is not None:
            for r, p in zip(result.curve.recall, result.curve.precision):
                w.writerow([f"{r:.6f}", f"{p:.6f}"])
    for row in result.interpretation[:top_dot]:
        title = f"rank {row.rank} weight {row.weight:+.3f}"
        (out / "ssts" / f"sst_{row.rank:03d}.dot").write_text(to_dot(row.H, title))
    return out
