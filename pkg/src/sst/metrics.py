"""Link-prediction metrics: ROC AUC, Davis-Goadrich PR area, 3-hop candidates, baselines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .graph import Graph, InvalidArgument, bfs_distances


@dataclass
class ScoredSet:
    pairs: list[tuple[int, int]]
    truth: np.ndarray  # 1 for positives, 0 for negatives
    scores: np.ndarray | None = None

    @classmethod
    def from_lists(cls, positives: Sequence, negatives: Sequence) -> "ScoredSet":
        pairs = list(positives) + list(negatives)
        truth = np.r_[np.ones(len(positives), dtype=np.int8), np.zeros(len(negatives), dtype=np.int8)]
        return cls(pairs, truth)

    @property
    def n_pos(self) -> int:
        return int(self.truth.sum())

    @property
    def n_neg(self) -> int:
        return len(self.truth) - self.n_pos


@dataclass
class PrCurve:
    recall: np.ndarray
    precision: np.ndarray
    area: float
    anchors: list[tuple[int, int]] = field(default_factory=list)  # achievable (TP, FP)


def _check_binary(scores, truth) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=float)
    truth = np.asarray(truth).astype(bool)
    if scores.shape != truth.shape:
        raise InvalidArgument("scores and truth differ in length")
    return scores, truth


def auc(scores, truth) -> float:
    """Rank-statistic ROC AUC; tied positive/negative pairs count one half."""
    scores, truth = _check_binary(scores, truth)
    n_pos = int(truth.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise InvalidArgument("AUC needs at least one positive and one negative")
    ranks = rankdata(scores)
    return float((ranks[truth].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def pr_anchor_points(scores, truth) -> list[tuple[int, int]]:
    """Cumulative (TP, FP) after each distinct score threshold, from (0, 0)."""
    scores, truth = _check_binary(scores, truth)
    order = np.argsort(-scores, kind="stable")
    s, t = scores[order], truth[order]
    # last index of each run of equal scores
    ends = np.r_[np.nonzero(np.diff(s))[0], len(s) - 1] if len(s) else np.array([], int)
    tp = np.cumsum(t)[ends]
    fp = (ends + 1) - tp
    return [(0, 0)] + list(zip(tp.tolist(), fp.tolist()))


def _segment_area(ta: int, fa: int, tb: int, fb: int) -> float:
    """Integral of TP/(TP+FP) over TP in [ta, tb] with FP linear in TP."""
    s = (fb - fa) / (tb - ta)
    c = 1.0 + s
    a = fa - s * ta
    if a == 0:
        return (tb - ta) / c
    return (tb - ta) / c - (a / (c * c)) * math.log((c * tb + a) / (c * ta + a))


def aupr_davis_goadrich(scores, truth) -> PrCurve:
    """PR area with Davis-Goadrich interpolation between achievable points.

    Between consecutive thresholds the false-positive count grows linearly with
    the true-positive count, so precision follows TP / (TP + FP(TP)). The area
    integrates that curve exactly; the returned points are the integer-TP
    interpolants.
    """
    scores, truth = _check_binary(scores, truth)
    n_pos = int(truth.sum())
    if n_pos == 0:
        raise InvalidArgument("PR curve needs at least one positive")
    anchors = pr_anchor_points(scores, truth)
    area = 0.0
    rec, prec = [], []
    for (ta, fa), (tb, fb) in zip(anchors, anchors[1:]):
        if tb == ta:
            continue
        area += _segment_area(ta, fa, tb, fb)
        slope = (fb - fa) / (tb - ta)
        if ta == 0:
            rec.append(0.0)
            prec.append(tb / (tb + fb))
        for x in range(ta + 1, tb + 1):
            fp = fa + slope * (x - ta)
            rec.append(x / n_pos)
            prec.append(x / (x + fp))
    return PrCurve(np.array(rec), np.array(prec), area / n_pos, anchors)


def aupr(scores, truth) -> float:
    return aupr_davis_goadrich(scores, truth).area


def aupr3_candidates(g_eval: Graph, test_edges: Iterable[tuple[int, int]], hops: int = 3,
                     directed_distance: bool = False) -> ScoredSet:
    """Evaluation pairs within ``hops``: non-edges as negatives, test edges as positives.

    A test edge is kept only if its endpoints stay within ``hops`` once the edge
    itself is removed. Negatives are every non-edge in range, never sampled.
    """
    positives = []
    for u, v in test_edges:
        if not g_eval.has_edge(u, v):
            raise InvalidArgument(f"test edge {(u, v)} missing from the evaluation graph")
        dist = bfs_distances(g_eval, u, hops, directed_distance, skip_edge=(u, v))
        if v in dist:
            positives.append((u, v))
    negatives = []
    for u in g_eval.nodes():
        for v in sorted(bfs_distances(g_eval, u, hops, directed_distance)):
            if v == u or g_eval.has_edge(u, v):
                continue
            if g_eval.directed or u < v:
                negatives.append((u, v))
    return ScoredSet.from_lists(positives, negatives)


def common_neighbors_score(g: Graph, u: int, v: int) -> int:
    """Shared neighbors; for directed graphs the sum over the four wedge orientations."""
    if not g.directed:
        return len(g.neighbors(u) & g.neighbors(v))
    su, pu = g.successors(u), g.predecessors(u)
    sv, pv = g.successors(v), g.predecessors(v)
    return len(su & pv) + len(su & sv) + len(pu & pv) + len(pu & sv)


class RandomScorer:
    """Uniform scores in [0, 1) from a seeded stream."""

    def __init__(self, seed: int = 0):
        self.rng = np.random.default_rng(seed)

    def __call__(self, u: int | None = None, v: int | None = None) -> float:
        return float(self.rng.random())

    def many(self, n: int) -> np.ndarray:
        return self.rng.random(n)


def random_score(seed: int = 0) -> float:
    return RandomScorer(seed)()


def score_pairs(g: Graph, pairs: Sequence[tuple[int, int]], method: str, seed: int = 0) -> np.ndarray:
    if method == "common_neighbors":
        return np.array([common_neighbors_score(g, u, v) for u, v in pairs], dtype=float)
    if method == "random":
        return RandomScorer(seed).many(len(pairs))
    raise InvalidArgument(f"unknown baseline {method!r}")
