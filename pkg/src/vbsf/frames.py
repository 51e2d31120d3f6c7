"""The Frame value flowing through the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GRAY8 = "gray8"
RGBA8 = "rgba8"

# ITU-R BT.601 luma weights for the R, G, B channels.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass
class Frame:
    """A single timestamped raster image.

    ``pixels`` is a uint8 array: shape (height, width) for grayscale, or
    (height, width, 4) for interleaved RGBA. ``index`` is the frame ordinal
    within its sequence; ``timestamp`` is seconds since sequence start.
    """

    pixels: np.ndarray
    index: int = 0
    timestamp: float = 0.0

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels)
        if self.pixels.dtype != np.uint8:
            raise ValueError(f"frame pixels must be uint8, got {self.pixels.dtype}")
        if self.pixels.ndim == 2:
            pass
        elif self.pixels.ndim == 3 and self.pixels.shape[2] == 4:
            pass
        else:
            raise ValueError(f"frame must be (H, W) gray or (H, W, 4) RGBA, got shape {self.pixels.shape}")
        if self.width < 1 or self.height < 1:
            raise ValueError("frame dimensions must be >= 1")
        if self.index < 0:
            raise ValueError("frame index must be non-negative")
        if self.timestamp < 0:
            raise ValueError("frame timestamp must be non-negative")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> str:
        return GRAY8 if self.pixels.ndim == 2 else RGBA8

    def with_pixels(self, pixels: np.ndarray) -> "Frame":
        """Same index/timestamp, new pixel content."""
        return Frame(pixels=pixels, index=self.index, timestamp=self.timestamp)


def luma(frame: Frame) -> np.ndarray:
    """Per-pixel luma as float64 in [0, 255].

    Grayscale frames return their samples; RGBA frames use the BT.601
    weighted combination of R, G, B (alpha ignored).
    """
    if frame.channels == GRAY8:
        return frame.pixels.astype(np.float64)
    rgb = frame.pixels[:, :, :3].astype(np.float64)
    return rgb @ LUMA_WEIGHTS
