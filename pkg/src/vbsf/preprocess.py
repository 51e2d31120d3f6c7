"""Per-frame enhancement stages: brightness gate, night-vision grayscale,
median denoise, percentile contrast stretch, integer-factor upscaling."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from PIL import Image
from scipy import ndimage

from vbsf.frames import GRAY8, RGBA8, Frame, luma


class Resample(Enum):
    NEAREST = "nearest"
    BILINEAR = "bilinear"
    LANCZOS3 = "lanczos3"


_PIL_RESAMPLE = {
    Resample.NEAREST: Image.Resampling.NEAREST,
    Resample.BILINEAR: Image.Resampling.BILINEAR,
    Resample.LANCZOS3: Image.Resampling.LANCZOS,
}


def mean_brightness(frame: Frame) -> float:
    """Mean luma over all pixels, normalized by 255. Range [0, 1]."""
    return float(luma(frame).mean() / 255.0)


def nightvision_grayscale(frame: Frame, gamma: float = 0.5) -> Frame:
    """Luma conversion followed by a brightening gamma curve (default 0.5).

    out = round(255 * (luma / 255) ** gamma); dimensions preserved.
    """
    g = luma(frame) / 255.0
    out = np.rint(255.0 * np.power(g, gamma)).astype(np.uint8)
    return frame.with_pixels(out)


def denoise_median(frame: Frame, radius: int = 1) -> Frame:
    """Median filter over the (2r+1)^2 neighborhood, edge-replicated borders.

    Grayscale input only; the pipeline runs this after grayscale conversion.
    """
    if radius < 1:
        raise ValueError("denoise radius must be >= 1")
    if frame.channels != GRAY8:
        raise ValueError("denoise_median expects a grayscale frame")
    out = ndimage.median_filter(frame.pixels, size=2 * radius + 1, mode="nearest")
    return frame.with_pixels(out)


def dehaze_stretch(
    frame: Frame, low_pct: float = 1.0, high_pct: float = 99.0, min_spread: float = 0.0
) -> Frame:
    """Linear contrast stretch mapping the low/high percentile values to 0/255.

    When the two percentile values coincide (e.g. constant image) the frame
    is returned unchanged. ``min_spread`` optionally widens that rule: a
    spread below it skips the stretch, capping noise amplification at
    255/min_spread (the pipeline uses this to keep near-constant frames
    stable for background modeling).
    """
    if not (0.0 <= low_pct < high_pct <= 100.0):
        raise ValueError(f"need 0 <= low_pct < high_pct <= 100, got {low_pct}, {high_pct}")
    if frame.channels != GRAY8:
        raise ValueError("dehaze_stretch expects a grayscale frame")
    lo, hi = np.percentile(frame.pixels, [low_pct, high_pct])
    if hi <= lo or hi - lo < min_spread:
        return frame.with_pixels(frame.pixels.copy())
    stretched = (frame.pixels.astype(np.float64) - lo) * (255.0 / (hi - lo))
    out = np.clip(np.rint(stretched), 0, 255).astype(np.uint8)
    return frame.with_pixels(out)


def upscale(frame: Frame, factor: int = 2, method: Resample = Resample.LANCZOS3) -> Frame:
    """Integer-factor upscaling; factor 1 returns a bit-identical copy."""
    if factor < 1:
        raise ValueError("upscale factor must be >= 1")
    if factor == 1:
        return frame.with_pixels(frame.pixels.copy())
    if method is Resample.NEAREST:
        out = np.repeat(np.repeat(frame.pixels, factor, axis=0), factor, axis=1)
        return frame.with_pixels(out)
    mode = "L" if frame.channels == GRAY8 else "RGBA"
    img = Image.fromarray(frame.pixels, mode=mode)
    resized = img.resize((frame.width * factor, frame.height * factor), _PIL_RESAMPLE[method])
    return frame.with_pixels(np.asarray(resized, dtype=np.uint8))


@dataclass(frozen=True)
class Upscaler:
    """Enhancer seam: any callable Frame -> Frame that scales dimensions by
    an integer factor fits here; this is the classical default."""

    factor: int = 2
    method: Resample = Resample.LANCZOS3

    def __call__(self, frame: Frame) -> Frame:
        return upscale(frame, self.factor, self.method)
