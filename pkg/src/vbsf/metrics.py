"""Confusion-matrix metrics, ROC/AUC, and k-fold cross-validation."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from vbsf.detector import FEATURE_DIM, LabeledPatch, PsoConfig, train


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricSet:
    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate: bool = False  # some ratio was 0/0 and reported as 0


@dataclass(frozen=True)
class RocCurve:
    """(FPR, TPR) pairs ordered by decreasing score threshold, starting at
    (0, 0) and ending at (1, 1); tied scores move together."""

    points: list[tuple[float, float]]
    auc: float


def confusion(scores, labels, threshold: float = 0.5) -> ConfusionCounts:
    """Threshold scores into predictions (positive iff score >= threshold)
    and count agreement with the binary labels."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have equal length")
    if scores.size == 0:
        raise ValueError("confusion needs at least one sample")
    pred = scores >= threshold
    pos = labels == 1
    return ConfusionCounts(
        tp=int(np.sum(pred & pos)),
        fp=int(np.sum(pred & ~pos)),
        tn=int(np.sum(~pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
    )


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def metrics(c: ConfusionCounts) -> MetricSet:
    """Accuracy, precision, recall, F1 from a confusion matrix.

    A 0/0 ratio (no predicted positives, or no actual positives) is reported
    as 0 with the ``degenerate`` flag set rather than raising, so threshold
    sweeps over extreme values do not abort.
    """
    if c.total < 1:
        raise ValueError("metrics need at least one counted sample")
    degenerate = False
    accuracy = (c.tp + c.tn) / c.total
    if c.tp + c.fp == 0:
        precision, degenerate = 0.0, True
    else:
        precision = c.tp / (c.tp + c.fp)
    if c.tp + c.fn == 0:
        recall, degenerate = 0.0, True
    else:
        recall = c.tp / (c.tp + c.fn)
    return MetricSet(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
        degenerate=degenerate,
    )


def roc(scores, labels) -> RocCurve:
    """ROC curve over all distinct score thresholds, AUC by trapezoid rule."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have equal length")
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc needs both classes present")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]

    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    n = scores.size
    while i < n:
        j = i
        while j < n and sorted_scores[j] == sorted_scores[i]:
            j += 1
        tp += int(np.sum(sorted_labels[i:j] == 1))
        fp += int(np.sum(sorted_labels[i:j] == 0))
        points.append((fp / n_neg, tp / n_pos))
        i = j

    fpr = np.array([p[0] for p in points])
    tpr = np.array([p[1] for p in points])
    auc = float(np.trapezoid(tpr, fpr))
    return RocCurve(points=points, auc=auc)


def roc_to_csv(curve: RocCurve, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["fpr", "tpr"])
        for fpr, tpr in curve.points:
            writer.writerow([repr(fpr), repr(tpr)])
        writer.writerow(["auc", repr(curve.auc)])


def kfold_split(n: int, k: int, seed: int = 0) -> np.ndarray:
    """Seeded shuffle + round-robin fold assignment; sizes differ by <= 1."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < k:
        raise ValueError(f"need at least k={k} samples, got {n}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[order] = np.arange(n) % k
    return fold_of


@dataclass
class CrossValResult:
    per_fold: list[MetricSet]

    def _values(self, name: str) -> np.ndarray:
        return np.array([getattr(m, name) for m in self.per_fold])

    def mean(self, name: str) -> float:
        return float(self._values(name).mean())

    def stdev(self, name: str) -> float:
        return float(self._values(name).std(ddof=1))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["fold", "accuracy", "precision", "recall", "f1"])
            for i, m in enumerate(self.per_fold):
                writer.writerow([i, repr(m.accuracy), repr(m.precision), repr(m.recall), repr(m.f1)])
            writer.writerow(["mean"] + [repr(self.mean(x)) for x in ("accuracy", "precision", "recall", "f1")])
            writer.writerow(["stdev"] + [repr(self.stdev(x)) for x in ("accuracy", "precision", "recall", "f1")])


def cross_validate(
    data: list[LabeledPatch],
    k: int = 4,
    pso_cfg: PsoConfig | None = None,
    seed: int = 0,
    threshold: float = 0.5,
) -> CrossValResult:
    """K-fold cross-validation of the swarm-trained classifier.

    Each fold is held out once; the classifier trains on the complement
    (fold training seed = base seed + fold index, so folds are independent
    and reruns identical) and is scored on the fold at the given threshold.
    """
    from vbsf.detector import default_training_config, predict

    fold_of = kfold_split(len(data), k, seed)
    labels = np.array([p.label for p in data])
    per_fold = []
    for fold in range(k):
        test_idx = np.flatnonzero(fold_of == fold)
        train_idx = np.flatnonzero(fold_of != fold)
        train_labels = labels[train_idx]
        if train_labels.min() == train_labels.max():
            raise ValueError(f"fold {fold}: training complement contains a single class")
        cfg = pso_cfg
        if cfg is None:
            cfg = default_training_config(seed=seed + fold)
        else:
            cfg = PsoConfig(
                bounds=[tuple(b) for b in cfg.bounds],
                swarm_size=cfg.swarm_size,
                max_iterations=cfg.max_iterations,
                omega=cfg.omega,
                c1=cfg.c1,
                c2=cfg.c2,
                vmax=None if cfg.vmax is None else cfg.vmax.copy(),
                seed=cfg.seed + fold,
            )
        clf, _, _ = train([data[i] for i in train_idx], cfg)
        X = np.stack([data[i].features for i in test_idx])
        scores = expit(X @ clf.weights + clf.bias)
        per_fold.append(metrics(confusion(scores, labels[test_idx], threshold)))
    return CrossValResult(per_fold=per_fold)
