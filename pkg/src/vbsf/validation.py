"""Temporal consistency gating, alert latching, and offline IoU validation.

At runtime a detection must be re-confirmed by an overlapping detection in
the subsequent frame before an alert fires; offline, predicted boxes are
checked against ground truth at a stricter IoU threshold per frame.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from vbsf.geometry import BoundingBox, Detection, iou


@dataclass
class ValidatorConfig:
    """Runtime consistency is judged at ``runtime_iou_threshold`` between
    consecutive frames; offline ground-truth validation at
    ``offline_iou_threshold``. ``consecutive_required`` consistent frames
    trigger an alert; ``rearm_after`` inconsistent frames clear the latch."""

    runtime_iou_threshold: float = 0.5
    offline_iou_threshold: float = 0.9
    consecutive_required: int = 2
    rearm_after: int = 10

    def __post_init__(self):
        if not (0.0 <= self.runtime_iou_threshold <= 1.0):
            raise ValueError("runtime_iou_threshold must lie in [0, 1]")
        if not (0.0 <= self.offline_iou_threshold <= 1.0):
            raise ValueError("offline_iou_threshold must lie in [0, 1]")
        if self.consecutive_required < 1:
            raise ValueError("consecutive_required must be >= 1")
        if self.rearm_after < 1:
            raise ValueError("rearm_after must be >= 1")


@dataclass
class TrackState:
    last_detections: list[Detection] = field(default_factory=list)
    consecutive_consistent: int = 0
    alert_active: bool = False
    inconsistent_streak: int = 0


@dataclass(frozen=True)
class AlertEvent:
    frame_index: int
    box: BoundingBox
    score: float
    timestamp: float

    def to_json_dict(self) -> dict:
        return {
            "frame": self.frame_index,
            "timestamp": self.timestamp,
            "box": {"x": self.box.x, "y": self.box.y, "w": self.box.w, "h": self.box.h},
            "score": self.score,
        }


def _as_box(item) -> BoundingBox:
    return item.box if isinstance(item, Detection) else item


def match_boxes(
    a: list, b: list, threshold: float
) -> list[tuple[int, int, float]]:
    """Greedy one-to-one matching by descending IoU.

    Accepts boxes or detections in either list. Only pairs with
    IoU >= threshold are candidates; ties break on (index in a, index in b).
    Returns (index_a, index_b, iou) triples.
    """
    candidates = []
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            v = iou(_as_box(ai), _as_box(bj))
            if v >= threshold and v > 0.0:
                candidates.append((-v, i, j))
    candidates.sort()
    used_a, used_b = set(), set()
    matches = []
    for neg_v, i, j in candidates:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        matches.append((i, j, -neg_v))
    return matches


def match_detections(
    a: list[Detection], b: list[Detection], threshold: float
) -> list[tuple[int, int, float]]:
    """Greedy IoU matching between two detection lists."""
    return match_boxes(a, b, threshold)


def check_consistency(
    state: TrackState, current: list[Detection], cfg: ValidatorConfig
) -> bool:
    """Update the track state with this frame's detections.

    Consistent when at least one current detection overlaps a previous-frame
    detection at the runtime threshold. The first frame with detections
    (after an empty one) starts the counter at 1. The counter resets to 0 on
    any inconsistent frame.
    """
    if not current:
        consistent = False
    elif not state.last_detections:
        consistent = True
        state.consecutive_consistent = 0  # counter restarts at 1 below
    else:
        consistent = bool(match_detections(state.last_detections, current, cfg.runtime_iou_threshold))

    if consistent:
        state.consecutive_consistent += 1
        state.inconsistent_streak = 0
    else:
        state.consecutive_consistent = 0
        state.inconsistent_streak += 1
    state.last_detections = list(current)
    return consistent


def alert_decision(
    state: TrackState, cfg: ValidatorConfig, frame_index: int, timestamp: float
) -> AlertEvent | None:
    """Emit an alert on the first frame the consistency counter reaches the
    required run length; latched until ``rearm_after`` inconsistent frames
    pass, so a persisting drone raises exactly one alert."""
    if state.alert_active and state.inconsistent_streak >= cfg.rearm_after:
        state.alert_active = False
    if state.consecutive_consistent >= cfg.consecutive_required and not state.alert_active:
        state.alert_active = True
        top = state.last_detections[0]
        return AlertEvent(
            frame_index=frame_index, box=top.box, score=top.score, timestamp=timestamp
        )
    return None


@dataclass
class ValidationReport:
    frame_pass: list[bool]
    best_ious: list[float]

    @property
    def pass_rate(self) -> float:
        if not self.frame_pass:
            return 1.0
        return sum(self.frame_pass) / len(self.frame_pass)

    def to_csv(self, path) -> None:
        """Rows of frame,pass,best_iou plus a one-line pass_rate summary."""
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["frame", "pass", "best_iou"])
            for i, (ok, bi) in enumerate(zip(self.frame_pass, self.best_ious)):
                writer.writerow([i, int(ok), repr(bi)])
            writer.writerow(["pass_rate", repr(self.pass_rate), ""])


def offline_validate(
    predictions: list[list], ground_truth: list[list], cfg: ValidatorConfig
) -> ValidationReport:
    """Per-frame ground-truth check at the offline IoU threshold.

    A frame passes when every ground-truth box is matched by a prediction at
    IoU >= offline_iou_threshold and no prediction is left unmatched; both
    misses and false positives fail the frame. Frames with neither ground
    truth nor predictions pass.
    """
    if len(predictions) != len(ground_truth):
        raise ValueError(
            f"frame count mismatch: {len(predictions)} predictions vs {len(ground_truth)} ground truth"
        )
    frame_pass, best_ious = [], []
    for preds, gts in zip(predictions, ground_truth):
        matches = match_boxes(gts, preds, cfg.offline_iou_threshold)
        frame_pass.append(len(matches) == len(gts) and len(matches) == len(preds))
        best = 0.0
        for g in gts:
            for p in preds:
                best = max(best, iou(_as_box(g), _as_box(p)))
        best_ious.append(best)
    return ValidationReport(frame_pass=frame_pass, best_ious=best_ious)
