"""Temporal-median background modeling and connected-component proposals.

A BackgroundModel keeps a sliding window of grayscale frames; the per-pixel
median over that window estimates the static scene. Pixels that differ from
the median beyond a threshold form the foreground mask, and 8-connected
foreground components become region proposals. Any callable
Frame -> bool-mask can stand in for this segmenter.
"""

from __future__ import annotations

from collections import deque

import numpy as np
from scipy import ndimage

from vbsf.frames import GRAY8, Frame
from vbsf.geometry import BoundingBox

EIGHT_CONNECTED = np.ones((3, 3), dtype=int)


class BackgroundModel:
    """Ring buffer of the last ``window`` grayscale frames.

    Single-writer: frames must be applied in order. The read operations
    (median, mask) are pure over the current buffer contents.
    """

    def __init__(self, window: int = 25):
        if window < 1:
            raise ValueError("window must be >= 1")
        self.window = window
        self._frames: deque[np.ndarray] = deque(maxlen=window)
        self._shape: tuple[int, int] | None = None

    def __len__(self) -> int:
        return len(self._frames)

    def update(self, frame: Frame) -> None:
        """Append a frame, evicting the oldest when the buffer is full."""
        if frame.channels != GRAY8:
            raise ValueError("background model takes grayscale frames")
        if self._shape is None:
            self._shape = frame.pixels.shape
        elif frame.pixels.shape != self._shape:
            raise ValueError(
                f"frame shape {frame.pixels.shape} does not match model shape {self._shape}"
            )
        self._frames.append(frame.pixels.copy())

    def median_background(self) -> np.ndarray:
        """Per-pixel median over the buffer (lower median for even counts)."""
        if not self._frames:
            raise ValueError("background model is empty")
        stack = np.stack(self._frames, axis=0)
        stack.sort(axis=0)
        return stack[(len(self._frames) - 1) // 2]

    def foreground_mask(self, frame: Frame, diff_threshold: int = 30) -> np.ndarray:
        """Boolean mask: True where |frame - median background| > threshold."""
        if frame.channels != GRAY8:
            raise ValueError("foreground_mask takes grayscale frames")
        bg = self.median_background()
        if frame.pixels.shape != bg.shape:
            raise ValueError(
                f"frame shape {frame.pixels.shape} does not match model shape {bg.shape}"
            )
        diff = np.abs(frame.pixels.astype(np.int16) - bg.astype(np.int16))
        return diff > diff_threshold


def connected_components(mask: np.ndarray, min_area: int = 25) -> list[BoundingBox]:
    """Tight bounding boxes of 8-connected foreground components.

    Components with fewer than ``min_area`` pixels are dropped. Output is
    ordered by box top-left, row-major.
    """
    labels, count = ndimage.label(mask, structure=EIGHT_CONNECTED)
    if count == 0:
        return []
    sizes = np.bincount(labels.ravel())
    boxes = []
    for lbl, sl in enumerate(ndimage.find_objects(labels), start=1):
        if sl is None or sizes[lbl] < min_area:
            continue
        rows, cols = sl
        boxes.append(
            BoundingBox(
                x=float(cols.start),
                y=float(rows.start),
                w=float(cols.stop - cols.start),
                h=float(rows.stop - rows.start),
            )
        )
    boxes.sort(key=lambda b: (b.y, b.x))
    return boxes
