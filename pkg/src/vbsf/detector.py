"""Patch classification: hand-designed features + a swarm-trained sigmoid.

Feature layout (82 values, fixed order):
  [0:64]   patch resampled to an 8x8 grayscale grid, intensities in [0, 1]
  [64:80]  normalized 16-bin intensity histogram of the patch
  [80]     aspect ratio w/h clamped to [0, 8], divided by 8
  [81]     foreground fill ratio inside the patch (0.5 when no mask given)

Only the final linear+sigmoid layer is trained; weights come from the
particle swarm minimizing binary cross-entropy on labeled patches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit

from vbsf.frames import GRAY8, Frame
from vbsf.geometry import BoundingBox, Detection, Label
from vbsf.pso import PsoConfig, optimize

FEATURE_DIM = 82
GRID = 8
HIST_BINS = 16
MODEL_MAGIC = "VBSF1"
BCE_EPS = 1e-7


@dataclass(frozen=True)
class LabeledPatch:
    """A feature vector with its binary label (1 = drone, 0 = non-drone)."""

    features: np.ndarray
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")
        if np.asarray(self.features).shape != (FEATURE_DIM,):
            raise ValueError(f"features must have length {FEATURE_DIM}")


@dataclass
class SigmoidClassifier:
    weights: np.ndarray
    bias: float

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (FEATURE_DIM,):
            raise ValueError(f"weights must have length {FEATURE_DIM}")
        if not (np.all(np.isfinite(self.weights)) and math.isfinite(self.bias)):
            raise ValueError("classifier parameters must be finite")


def _resample_grid(patch: np.ndarray, size: int = GRID) -> np.ndarray:
    """Block-mean resample of a 2D patch to size x size; cells that would be
    empty (patch smaller than the grid) fall back to nearest sampling."""
    h, w = patch.shape
    rows = np.floor(np.arange(size + 1) * h / size).astype(int)
    cols = np.floor(np.arange(size + 1) * w / size).astype(int)
    out = np.empty((size, size))
    for i in range(size):
        r0, r1 = rows[i], max(rows[i + 1], rows[i] + 1)
        r0 = min(r0, h - 1)
        for j in range(size):
            c0, c1 = cols[j], max(cols[j + 1], cols[j] + 1)
            c0 = min(c0, w - 1)
            out[i, j] = patch[r0:r1, c0:c1].mean()
    return out


def _patch_bounds(frame: Frame, box: BoundingBox) -> tuple[int, int, int, int]:
    x0 = max(int(math.floor(box.x)), 0)
    y0 = max(int(math.floor(box.y)), 0)
    x1 = min(int(math.ceil(box.x + box.w)), frame.width)
    y1 = min(int(math.ceil(box.y + box.h)), frame.height)
    if x1 <= x0 or y1 <= y0:
        raise ValueError(f"box {box} lies outside the {frame.width}x{frame.height} frame")
    return x0, y0, x1, y1


def extract_features(frame: Frame, box: BoundingBox, mask: np.ndarray | None = None) -> np.ndarray:
    """Deterministic 82-value feature vector for one proposal patch."""
    if frame.channels != GRAY8:
        raise ValueError("extract_features expects a grayscale frame")
    x0, y0, x1, y1 = _patch_bounds(frame, box)
    patch = frame.pixels[y0:y1, x0:x1]

    grid = _resample_grid(patch.astype(np.float64) / 255.0).ravel()
    hist = np.bincount(patch.ravel() >> 4, minlength=HIST_BINS).astype(np.float64)
    hist /= patch.size
    aspect = min(max(box.w / box.h, 0.0), 8.0) / 8.0
    if mask is None:
        fill = 0.5
    else:
        fill = float(mask[y0:y1, x0:x1].mean())
    return np.concatenate([grid, hist, [aspect, fill]])


def predict(clf: SigmoidClassifier, features: np.ndarray) -> float:
    """Sigmoid of the linear score; always strictly inside (0, 1)."""
    return float(expit(clf.weights @ np.asarray(features, dtype=np.float64) + clf.bias))


def bce_loss(scores, labels) -> float:
    """Mean binary cross-entropy, scores clamped to [eps, 1-eps] first."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have equal length")
    if scores.size == 0:
        raise ValueError("bce_loss needs at least one sample")
    s = np.clip(scores, BCE_EPS, 1.0 - BCE_EPS)
    return float(-np.mean(labels * np.log(s) + (1.0 - labels) * np.log(1.0 - s)))


def default_training_config(seed: int = 0, iterations: int = 50) -> PsoConfig:
    """Swarm setup for classifier training: 82 weights + 1 bias."""
    return PsoConfig(
        bounds=[(-10.0, 10.0)] * (FEATURE_DIM + 1),
        swarm_size=40,
        max_iterations=iterations,
        seed=seed,
    )


def train(
    data: list[LabeledPatch], cfg: PsoConfig | None = None
) -> tuple[SigmoidClassifier, list[float], list[float]]:
    """Fit the sigmoid layer by swarm search under BCE loss.

    Returns (classifier, per-iteration loss history, per-iteration training
    accuracy at threshold 0.5). One particle is seeded at the origin, so the
    final loss never exceeds that of the zero classifier.
    """
    if not data:
        raise ValueError("training data is empty")
    labels = np.array([p.label for p in data], dtype=np.float64)
    if labels.min() == labels.max():
        raise ValueError("single-class data: training needs both labels")
    X = np.stack([p.features for p in data])

    if cfg is None:
        cfg = default_training_config()
    if cfg.dim != FEATURE_DIM + 1:
        raise ValueError(f"training config must have {FEATURE_DIM + 1} dimensions")

    def objective(theta: np.ndarray) -> float:
        scores = expit(X @ theta[:FEATURE_DIM] + theta[FEATURE_DIM])
        return bce_loss(scores, labels)

    origin = np.zeros((1, FEATURE_DIM + 1))
    result = optimize(objective, cfg, initial_positions=origin, record=True)

    accuracy = []
    for theta in result.gbest_positions:
        scores = expit(X @ theta[:FEATURE_DIM] + theta[FEATURE_DIM])
        accuracy.append(float(np.mean((scores >= 0.5) == (labels == 1.0))))
    clf = SigmoidClassifier(
        weights=result.best_position[:FEATURE_DIM],
        bias=float(result.best_position[FEATURE_DIM]),
    )
    return clf, result.history, accuracy


def detect(
    frame: Frame,
    proposals: list[BoundingBox],
    clf: SigmoidClassifier,
    score_threshold: float = 0.5,
    mask: np.ndarray | None = None,
) -> list[Detection]:
    """Score each proposal; keep those at or above the threshold as drone
    detections, sorted by descending score (stable in proposal order)."""
    detections = []
    for box in proposals:
        score = predict(clf, extract_features(frame, box, mask))
        if score >= score_threshold:
            detections.append(Detection(box=box, score=score, label=Label.DRONE))
    detections.sort(key=lambda d: -d.score)
    return detections


def save_classifier(clf: SigmoidClassifier, path) -> None:
    """Human-diffable text format: magic, dimension count, one parameter per
    line (82 weights then the bias)."""
    lines = [MODEL_MAGIC, str(FEATURE_DIM)]
    lines += [repr(float(w)) for w in clf.weights]
    lines.append(repr(float(clf.bias)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_classifier(path) -> SigmoidClassifier:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if len(lines) < 2 or lines[0] != MODEL_MAGIC:
        raise ValueError(f"{path}: not a {MODEL_MAGIC} model file")
    dim = int(lines[1])
    if dim != FEATURE_DIM:
        raise ValueError(f"{path}: unsupported feature dimension {dim}")
    params = [float(v) for v in lines[2 : 2 + dim + 1]]
    if len(params) != dim + 1:
        raise ValueError(f"{path}: expected {dim + 1} parameters, found {len(params)}")
    return SigmoidClassifier(weights=np.array(params[:dim]), bias=params[dim])
