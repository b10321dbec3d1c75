"""Trainable linear max-margin binary classifier.

Hinge loss with L2 regularization, minimized by Pegasos-style stochastic
subgradient descent (step 1/(lambda*t), shuffled per epoch by seed). The
bias is learned as an augmented constant feature, so the same convergence
argument covers it. Used by both the assertion detector and the
paraphrase classifier.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .textkit import NORMALIZER_VERSION

# sparse feature-id -> value
FeatureVector = dict[int, float]

MODEL_FORMAT = "storygraph-linear/1"


class TrainingError(Exception):
    pass


@dataclass
class LinearModel:
    weights: np.ndarray  # dense, indexed by feature id
    bias: float
    lam: float
    epochs: int
    seed: int
    normalizer_version: str = NORMALIZER_VERSION

    @property
    def dim(self) -> int:
        return len(self.weights)


def decision(model: LinearModel, x: FeatureVector) -> float:
    """Margin w . x + b. Feature ids beyond the trained dim contribute 0."""
    acc = 0.0
    w = model.weights
    dim = len(w)
    for fid in sorted(x):
        if 0 <= fid < dim:
            acc += w[fid] * x[fid]
    return acc + model.bias


def predict(model: LinearModel, x: FeatureVector) -> int:
    """+1 / -1 by margin sign; an exact zero goes to -1 (conservative)."""
    return 1 if decision(model, x) > 0.0 else -1


def objective(model: LinearModel, data: list[tuple[FeatureVector, int]]) -> float:
    """(lam/2)(|w|^2 + b^2) + mean hinge; the quantity training minimizes."""
    reg = 0.5 * model.lam * (float(model.weights @ model.weights) + model.bias**2)
    hinge = 0.0
    for x, y in data:
        hinge += max(0.0, 1.0 - y * decision(model, x))
    return reg + hinge / len(data)


def train(
    data: list[tuple[FeatureVector, int]],
    lam: float = 1e-4,
    epochs: int = 20,
    seed: int = 0,
) -> LinearModel:
    """Pegasos on (lam/2)|w|^2 + mean hinge loss.

    Deterministic given (data order, lam, epochs, seed). The weight vector
    is kept as scale * v so each step is sparse.
    """
    if lam <= 0:
        raise TrainingError("lambda must be positive")
    if epochs < 1:
        raise TrainingError("epochs must be >= 1")
    labels = {y for _, y in data}
    if labels != {-1, 1}:
        raise TrainingError(f"need both labels -1 and +1, got {sorted(labels)}")

    dim = 1 + max((max(x) for x, _ in data if x), default=-1)
    bias_id = dim  # augmented constant feature carries the bias
    v = np.zeros(dim + 1)
    scale = 1.0
    rng = np.random.default_rng(seed)
    t = 0
    for _ in range(epochs):
        order = rng.permutation(len(data))
        for i in order:
            t += 1
            x, y = data[int(i)]
            eta = 1.0 / (lam * t)
            margin = scale * (sum(v[f] * val for f, val in x.items()) + v[bias_id])
            if t == 1:
                # (1 - eta*lam) is exactly 0 here; restart the scale
                scale = 1.0
            else:
                scale *= 1.0 - eta * lam
            if y * margin < 1.0:
                step = eta * y / scale
                for f, val in x.items():
                    v[f] += step * val
                v[bias_id] += step
    w = scale * v
    return LinearModel(
        weights=w[:dim].copy(),
        bias=float(w[bias_id]),
        lam=lam,
        epochs=epochs,
        seed=seed,
    )


# --- evaluation ------------------------------------------------------------

def confusion(model: LinearModel, data: list[tuple[FeatureVector, int]]) -> tuple[int, int, int, int]:
    """(tp, fp, fn, tn) with +1 as the positive class."""
    tp = fp = fn = tn = 0
    for x, y in data:
        pred = predict(model, x)
        if pred == 1 and y == 1:
            tp += 1
        elif pred == 1:
            fp += 1
        elif y == 1:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def _score(metric: str, tp: int, fp: int, fn: int, tn: int) -> float:
    if metric == "accuracy":
        total = tp + fp + fn + tn
        return (tp + tn) / total if total else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if metric == "precision":
        return precision
    if metric == "recall":
        return recall
    if metric == "f1":
        # undefined P or R makes the fold score 0
        if tp + fp == 0 or tp + fn == 0 or precision + recall == 0.0:
            return 0.0
        return 2 * precision * recall / (precision + recall)
    raise ValueError(f"unknown metric {metric!r}")


def stratified_folds(labels: list[int], k: int, seed: int) -> list[list[int]]:
    """Deal each class round-robin into k folds after a seeded shuffle."""
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in (1, -1):
        idx = [i for i, y in enumerate(labels) if y == cls]
        order = rng.permutation(len(idx))
        for pos, j in enumerate(order):
            folds[pos % k].append(idx[int(j)])
    return [sorted(f) for f in folds]


def evaluate_kfold(
    data: list[tuple[FeatureVector, int]],
    k: int,
    metric: str = "f1",
    seed: int = 0,
    lam: float = 1e-4,
    epochs: int = 20,
) -> tuple[list[float], float]:
    """Stratified k-fold cross-validation; returns (per-fold scores, mean)."""
    if k < 2 or k > len(data):
        raise TrainingError(f"k must be in [2, {len(data)}], got {k}")
    labels = [y for _, y in data]
    if len(set(labels)) < 2:
        raise TrainingError("both classes must be present")
    folds = stratified_folds(labels, k, seed)
    scores = []
    for held in folds:
        held_set = set(held)
        train_data = [d for i, d in enumerate(data) if i not in held_set]
        test_data = [data[i] for i in held]
        model = train(train_data, lam=lam, epochs=epochs, seed=seed)
        scores.append(_score(metric, *confusion(model, test_data)))
    return scores, sum(scores) / len(scores)


def roc_curve(
    model: LinearModel, data: list[tuple[FeatureVector, int]]
) -> list[tuple[float, float]]:
    """(FPR, TPR) points from sweeping the decision threshold.

    Starts at (0,0) (threshold above every score), ends at (1,1); both
    coordinates are nondecreasing along the sweep.
    """
    pos = sum(1 for _, y in data if y == 1)
    neg = len(data) - pos
    if pos == 0 or neg == 0:
        raise TrainingError("ROC needs both classes present")
    scored = sorted(((decision(model, x), y) for x, y in data), key=lambda s: -s[0])
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < len(scored):
        j = i
        while j < len(scored) and scored[j][0] == scored[i][0]:
            if scored[j][1] == 1:
                tp += 1
            else:
                fp += 1
            j += 1
        points.append((fp / neg, tp / pos))
        i = j
    return points


def roc_auc(points: list[tuple[float, float]]) -> float:
    """Trapezoidal area under an ROC point list."""
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


# --- persistence -----------------------------------------------------------

def model_to_dict(model: LinearModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "normalizer_version": model.normalizer_version,
        "lambda": model.lam,
        "epochs": model.epochs,
        "seed": model.seed,
        "dim": model.dim,
        "bias": model.bias,
        "weights": [[i, float(w)] for i, w in enumerate(model.weights) if w != 0.0],
    }


def model_from_dict(doc: dict) -> LinearModel:
    if doc.get("format") != MODEL_FORMAT:
        raise TrainingError(f"unsupported model format: {doc.get('format')!r}")
    weights = np.zeros(int(doc["dim"]))
    for fid, w in doc["weights"]:
        weights[int(fid)] = float(w)
    return LinearModel(
        weights=weights,
        bias=float(doc["bias"]),
        lam=float(doc["lambda"]),
        epochs=int(doc["epochs"]),
        seed=int(doc["seed"]),
        normalizer_version=str(doc["normalizer_version"]),
    )


def save_model(model: LinearModel, path: str | Path):
    Path(path).write_text(json.dumps(model_to_dict(model)), encoding="utf-8")


def load_model(path: str | Path) -> LinearModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
