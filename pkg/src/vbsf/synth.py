"""Ground-truthed synthetic scenes and the image/box augmentation suite.

Three procedural silhouettes move over simple backgrounds: a plus-shaped
four-rotor drone, a twin-ellipse bird with a per-frame wing phase, and an
elongated-bar plane. Realism is not the goal; separable shape statistics
are, so the detector's features can discriminate. Annotation boxes are the
tight bounds of the clean (pre-noise) rendering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from PIL import Image

from vbsf.frames import Frame
from vbsf.geometry import BoundingBox


class ObjectKind(Enum):
    DRONE = "drone"
    BIRD = "bird"
    PLANE = "plane"


@dataclass(frozen=True)
class FlatBackground:
    level: int = 50


@dataclass(frozen=True)
class GradientBackground:
    low: int = 20
    high: int = 120


@dataclass(frozen=True)
class NoisyFlatBackground:
    level: int = 50
    sigma: float = 3.0


Background = FlatBackground | GradientBackground | NoisyFlatBackground


@dataclass(frozen=True)
class ObjectSpec:
    kind: ObjectKind
    size: int
    start: tuple[float, float]  # center position at the appear frame
    velocity: tuple[float, float] = (0.0, 0.0)  # pixels per frame
    intensity: int = 200
    appear: int = 0  # first frame the object is rendered

    def __post_init__(self):
        if self.size < 4:
            raise ValueError("object size must be >= 4 pixels")
        if not (0 <= self.intensity <= 255):
            raise ValueError("object intensity must be a gray level")
        if self.appear < 0:
            raise ValueError("appear frame must be non-negative")


@dataclass
class SceneConfig:
    width: int = 128
    height: int = 96
    frame_count: int = 100
    background: Background = field(default_factory=FlatBackground)
    objects: list[ObjectSpec] = field(default_factory=list)
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.frame_count < 1:
            raise ValueError("frame_count must be >= 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


@dataclass
class AnnotatedSequence:
    frames: list[Frame]
    annotations: list[list[tuple[BoundingBox, ObjectKind]]]  # one list per frame


def _object_mask(spec: ObjectSpec, frame_idx: int, width: int, height: int) -> np.ndarray:
    """Boolean mask of the object's pixels at its position in this frame."""
    t = frame_idx - spec.appear
    cx = spec.start[0] + t * spec.velocity[0]
    cy = spec.start[1] + t * spec.velocity[1]
    ys, xs = np.mgrid[0:height, 0:width]
    dx = xs - cx
    dy = ys - cy
    s = spec.size

    if spec.kind is ObjectKind.DRONE:
        half = s / 2.0
        thick = max(1.0, s / 5.0) / 2.0
        rotor_r = max(1.0, s / 6.0)
        arms = ((np.abs(dx) <= half) & (np.abs(dy) <= thick)) | (
            (np.abs(dy) <= half) & (np.abs(dx) <= thick)
        )
        rotors = np.zeros_like(arms)
        for rx, ry in ((half, 0.0), (-half, 0.0), (0.0, half), (0.0, -half)):
            rotors |= (dx - rx) ** 2 + (dy - ry) ** 2 <= rotor_r**2
        return arms | rotors

    if spec.kind is ObjectKind.BIRD:
        phase = math.sin(2.0 * math.pi * t / 8.0)
        lift = phase * s / 4.0
        a = s / 3.0  # wing semi-axis, horizontal
        b = max(1.0, s / 8.0)  # wing semi-axis, vertical
        off = s / 3.0
        left = ((dx + off) / a) ** 2 + ((dy - lift) / b) ** 2 <= 1.0
        right = ((dx - off) / a) ** 2 + ((dy - lift) / b) ** 2 <= 1.0
        body_r = max(1.0, s / 6.0)
        body = dx**2 + dy**2 <= body_r**2
        return left | right | body

    # plane: elongated bar with a small tail fin
    half = s / 2.0
    bar = (np.abs(dx) <= half) & (np.abs(dy) <= max(1.0, s / 8.0))
    tail = (np.abs(dx + half * 0.8) <= max(1.0, s / 10.0)) & (dy <= 0) & (dy >= -s / 4.0)
    return bar | tail


def _tight_box(mask: np.ndarray) -> BoundingBox | None:
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    if rows.size == 0:
        return None
    return BoundingBox(
        x=float(cols[0]),
        y=float(rows[0]),
        w=float(cols[-1] - cols[0] + 1),
        h=float(rows[-1] - rows[0] + 1),
    )


def _render_background(cfg: SceneConfig) -> np.ndarray:
    bg = cfg.background
    if isinstance(bg, FlatBackground):
        return np.full((cfg.height, cfg.width), bg.level, dtype=np.uint8)
    if isinstance(bg, GradientBackground):
        ramp = np.linspace(bg.low, bg.high, cfg.width)
        return np.rint(np.tile(ramp, (cfg.height, 1))).astype(np.uint8)
    if isinstance(bg, NoisyFlatBackground):
        # static texture, fixed across frames, derived from the scene seed
        rng = np.random.default_rng((cfg.seed, 0xB6))
        field_ = bg.level + rng.normal(0.0, bg.sigma, size=(cfg.height, cfg.width))
        return np.clip(np.rint(field_), 0, 255).astype(np.uint8)
    raise TypeError(f"unknown background {bg!r}")


def render_sequence(cfg: SceneConfig) -> AnnotatedSequence:
    """Rasterize the configured scene; deterministic per seed.

    Objects must lie fully inside the frame on their appear frame. Boxes are
    recorded pre-noise and clipped to the frame; an object with no in-frame
    pixels on a given frame simply has no annotation there.
    """
    background = _render_background(cfg)
    for spec in cfg.objects:
        mask = _object_mask(spec, spec.appear, cfg.width, cfg.height)
        box = _tight_box(mask)
        if box is None:
            raise ValueError(f"object {spec} is out of frame at spawn")
        edge = mask[0, :].any() or mask[-1, :].any() or mask[:, 0].any() or mask[:, -1].any()
        if edge:
            raise ValueError(f"object {spec} does not fit within the frame at spawn")

    frames, annotations = [], []
    for i in range(cfg.frame_count):
        canvas = background.copy()
        per_frame = []
        for spec in cfg.objects:
            if i < spec.appear:
                continue
            mask = _object_mask(spec, i, cfg.width, cfg.height)
            box = _tight_box(mask)
            if box is None:
                continue
            canvas[mask] = spec.intensity
            per_frame.append((box, spec.kind))
        if cfg.noise_sigma > 0:
            rng = np.random.default_rng((cfg.seed, 1, i))
            noisy = canvas.astype(np.float64) + rng.normal(0.0, cfg.noise_sigma, canvas.shape)
            canvas = np.clip(np.rint(noisy), 0, 255).astype(np.uint8)
        frames.append(Frame(pixels=canvas, index=i, timestamp=float(i)))
        annotations.append(per_frame)
    return AnnotatedSequence(frames=frames, annotations=annotations)


# ---------------------------------------------------------------------------
# augmentation: each op maps (image, boxes) -> (image, boxes) with the boxes
# transformed by the exact same geometric map as the pixels.

def flip_h(image: np.ndarray, boxes: list[BoundingBox]) -> tuple[np.ndarray, list[BoundingBox]]:
    w = image.shape[1]
    out = [BoundingBox(w - b.x - b.w, b.y, b.w, b.h) for b in boxes]
    return image[:, ::-1].copy(), out


def flip_v(image: np.ndarray, boxes: list[BoundingBox]) -> tuple[np.ndarray, list[BoundingBox]]:
    h = image.shape[0]
    out = [BoundingBox(b.x, h - b.y - b.h, b.w, b.h) for b in boxes]
    return image[::-1, :].copy(), out


def rotate90(
    image: np.ndarray, boxes: list[BoundingBox], turns: int = 1
) -> tuple[np.ndarray, list[BoundingBox]]:
    """Rotate counter-clockwise by 90 degrees, ``turns`` times."""
    turns = turns % 4
    out_img, out_boxes = image.copy(), list(boxes)
    for _ in range(turns):
        w = out_img.shape[1]
        out_img = np.rot90(out_img).copy()
        out_boxes = [BoundingBox(b.y, w - b.x - b.w, b.h, b.w) for b in out_boxes]
    return out_img, out_boxes


def scale(
    image: np.ndarray, boxes: list[BoundingBox], factor: float
) -> tuple[np.ndarray, list[BoundingBox]]:
    if factor <= 0:
        raise ValueError("scale factor must be > 0")
    new_w = max(1, round(image.shape[1] * factor))
    new_h = max(1, round(image.shape[0] * factor))
    img = Image.fromarray(image, mode="L").resize((new_w, new_h), Image.Resampling.BILINEAR)
    return np.asarray(img, dtype=np.uint8), [b.scale(factor) for b in boxes]


def crop(
    image: np.ndarray, boxes: list[BoundingBox], region: tuple[int, int, int, int]
) -> tuple[np.ndarray, list[BoundingBox]]:
    """Crop to region (x, y, w, h); boxes shift and clip to the region, and
    a box whose clipped area drops below 25% of its original area is
    dropped."""
    rx, ry, rw, rh = region
    if rw < 1 or rh < 1 or rx < 0 or ry < 0 or rx + rw > image.shape[1] or ry + rh > image.shape[0]:
        raise ValueError(f"crop region {region} not within the image")
    out_boxes = []
    for b in boxes:
        left = max(b.x, rx)
        top = max(b.y, ry)
        right = min(b.x + b.w, rx + rw)
        bottom = min(b.y + b.h, ry + rh)
        if right <= left or bottom <= top:
            continue
        clipped_area = (right - left) * (bottom - top)
        if clipped_area < 0.25 * b.w * b.h:
            continue
        out_boxes.append(BoundingBox(left - rx, top - ry, right - left, bottom - top))
    return image[ry : ry + rh, rx : rx + rw].copy(), out_boxes


def brightness(
    image: np.ndarray, boxes: list[BoundingBox], delta: int
) -> tuple[np.ndarray, list[BoundingBox]]:
    out = np.clip(image.astype(np.int16) + delta, 0, 255).astype(np.uint8)
    return out, list(boxes)


def gaussian_noise(
    image: np.ndarray, boxes: list[BoundingBox], sigma: float, seed: int = 0
) -> tuple[np.ndarray, list[BoundingBox]]:
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    rng = np.random.default_rng(seed)
    noisy = image.astype(np.float64) + rng.normal(0.0, sigma, image.shape)
    return np.clip(np.rint(noisy), 0, 255).astype(np.uint8), list(boxes)
