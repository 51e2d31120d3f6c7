"""Axis-aligned bounding boxes and the intersection-over-union measure."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Label(Enum):
    DRONE = "drone"
    NON_DRONE = "non_drone"


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned rectangle stored as (left, top, width, height) in pixels.

    Coordinates are real-valued; width and height must be strictly positive.
    """

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for name, v in (("x", self.x), ("y", self.y), ("w", self.w), ("h", self.h)):
            if not math.isfinite(v):
                raise ValueError(f"BoundingBox.{name} must be finite, got {v!r}")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"BoundingBox needs positive extent, got w={self.w}, h={self.h}")

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def bottom(self) -> float:
        return self.y + self.h

    def translate(self, dx: float, dy: float) -> "BoundingBox":
        return BoundingBox(self.x + dx, self.y + dy, self.w, self.h)

    def scale(self, factor: float) -> "BoundingBox":
        """Scale about the image origin (all four parameters multiply)."""
        return BoundingBox(self.x * factor, self.y * factor, self.w * factor, self.h * factor)


@dataclass(frozen=True)
class Detection:
    """A localized classification result: box, confidence score, class label."""

    box: BoundingBox
    score: float
    label: Label = Label.DRONE

    def __post_init__(self):
        if not (0.0 <= self.score <= 1.0):
            raise ValueError(f"Detection score must lie in [0, 1], got {self.score}")


def box_area(b: BoundingBox) -> float:
    """Area in square pixels; strictly positive by the box invariants."""
    return b.w * b.h


def box_intersection(a: BoundingBox, b: BoundingBox) -> BoundingBox | None:
    """Overlap rectangle of two boxes, or None when interiors are disjoint.

    Touching edges (zero-width or zero-height contact) count as disjoint.
    """
    left = max(a.x, b.x)
    top = max(a.y, b.y)
    right = min(a.right, b.right)
    bottom = min(a.bottom, b.bottom)
    if right <= left or bottom <= top:
        return None
    return BoundingBox(left, top, right - left, bottom - top)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union: overlap area / union area, in [0, 1].

    1 for identical boxes, 0 for disjoint ones.
    """
    if a == b:
        return 1.0
    inter = box_intersection(a, b)
    if inter is None:
        return 0.0
    ai = box_area(inter)
    # clamp: rounding in the intersection extent can nudge the ratio past 1
    return min(ai / (box_area(a) + box_area(b) - ai), 1.0)
