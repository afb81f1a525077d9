"""Deterministic linear SVM on sparse count vectors.

Primal objective, per example average:

    ||w||^2 / (2 C n) + mean(max(0, 1 - y (w.z + b)))

where ``z`` are standardized features. Optimized by mini-batch subgradient
descent with a ``1/sqrt(t)`` step, averaging the iterates of the second half
of the epochs; the bias is not regularized.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse

from .graph import InvalidArgument


DENSE_LIMIT = 50_000_000  # standardize the whole matrix up front below this many cells


@dataclass
class SvmConfig:
    C: float = 1.0
    epochs: int = 50
    seed: int = 0
    batch_size: int = 16
    step: float = 2.0

    def __post_init__(self):
        if self.C <= 0 or self.epochs < 1 or self.batch_size < 1 or self.step <= 0:
            raise InvalidArgument(f"invalid SVM settings {asdict(self)}")


@dataclass
class LinearModel:
    """Hyperplane over standardized SST counts, keyed by canonical string.

    ``weights`` act on standardized features ``(x - mean) / scale``; the
    interpretation direction is ``weights / ||weights||``.
    """

    labels: list[str]
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    scale: np.ndarray
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.mean = np.asarray(self.mean, dtype=float)
        self.scale = np.asarray(self.scale, dtype=float)
        self._index = {h: i for i, h in enumerate(self.labels)}

    def unit_weights(self) -> np.ndarray:
        norm = np.linalg.norm(self.weights)
        return self.weights / norm if norm > 0 else self.weights.copy()

    def raw_coefficients(self) -> tuple[np.ndarray, float]:
        """Weights and bias acting on raw counts."""
        coef = self.weights / self.scale
        return coef, float(self.bias - coef @ self.mean)

    def design(self, rows: Sequence[Counter]) -> sparse.csr_matrix:
        """Raw count matrix; strings unseen in training are dropped."""
        return counters_to_matrix(rows, self._index)

    def decision(self, rows: Sequence[Counter] | sparse.spmatrix) -> np.ndarray:
        x = rows if sparse.issparse(rows) else self.design(rows)
        coef, b = self.raw_coefficients()
        return np.asarray(x @ coef).ravel() + b

    def to_json(self) -> dict:
        return {
            "labels": self.labels,
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "config": self.config,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LinearModel":
        return cls(data["labels"], data["weights"], data["bias"], data["mean"],
                   data["scale"], data.get("config", {}))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "LinearModel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def counters_to_matrix(rows: Sequence[Counter], index: dict[str, int]) -> sparse.csr_matrix:
    data, cols, ptr = [], [], [0]
    for row in rows:
        items = sorted((index[h], c) for h, c in row.items() if h in index)
        cols.extend(i for i, _ in items)
        data.extend(c for _, c in items)
        ptr.append(len(cols))
    return sparse.csr_matrix((np.asarray(data, float), np.asarray(cols, np.int64), np.asarray(ptr)),
                             shape=(len(rows), len(index)))


def feature_index(rows: Sequence[Counter]) -> list[str]:
    """Sorted vocabulary of canonical strings seen in ``rows``."""
    vocab: set[str] = set()
    for row in rows:
        vocab.update(row)
    return sorted(vocab)


def standardization(x: sparse.csr_matrix) -> tuple[np.ndarray, np.ndarray]:
    n = x.shape[0]
    mean = np.asarray(x.mean(axis=0)).ravel()
    sq = np.asarray(x.multiply(x).mean(axis=0)).ravel()
    var = np.maximum(sq - mean * mean, 0.0)
    scale = np.sqrt(var)
    scale[scale <= 1e-12 * max(1.0, float(np.abs(mean).max(initial=0.0)))] = 1.0
    if n == 0:
        raise InvalidArgument("empty training matrix")
    return mean, scale


def hinge_objective(w: np.ndarray, b: float, z: np.ndarray, y: np.ndarray, C: float) -> float:
    margins = 1 - y * (z @ w + b)
    return float(w @ w / (2 * C * len(y)) + np.maximum(margins, 0).mean())


def svm_train(x, y, cfg: SvmConfig | None = None, labels: list[str] | None = None) -> LinearModel:
    """Fit the hinge-loss linear classifier.

    ``x`` is a raw count matrix (sparse or dense), ``y`` holds +1/-1 (or 1/0).
    """
    cfg = cfg or SvmConfig()
    x = sparse.csr_matrix(x, dtype=float)
    y = np.where(np.asarray(y) > 0, 1.0, -1.0)
    if x.shape[0] != len(y):
        raise InvalidArgument("feature rows and labels differ in length")
    if len(np.unique(y)) < 2:
        raise InvalidArgument("training data needs both classes")
    n, d = x.shape
    mean, scale = standardization(x)
    lam = 1.0 / (cfg.C * n)
    rng = np.random.default_rng(cfg.seed)
    w = np.zeros(d)
    b = 0.0
    w_avg = np.zeros(d)
    b_avg = 0.0
    dense = (x.toarray() - mean) / scale if n * d <= DENSE_LIMIT else None
    t = 0
    averaged = 0
    burn_in = cfg.epochs // 2
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            z = dense[idx] if dense is not None else (x[idx].toarray() - mean) / scale
            yb = y[idx]
            active = yb * (z @ w + b) < 1
            grad_w = lam * w - (yb[active, None] * z[active]).sum(axis=0) / len(idx)
            grad_b = -yb[active].sum() / len(idx)
            t += 1
            eta = cfg.step / np.sqrt(t)
            w -= eta * grad_w
            b -= eta * grad_b
            if epoch >= burn_in:
                averaged += 1
                w_avg += (w - w_avg) / averaged
                b_avg += (b - b_avg) / averaged
    return LinearModel(list(labels) if labels is not None else [str(i) for i in range(d)],
                       w_avg, float(b_avg), mean, scale, asdict(cfg))


def standardized_dense(x, model: LinearModel) -> np.ndarray:
    return (sparse.csr_matrix(x).toarray() - model.mean) / model.scale
