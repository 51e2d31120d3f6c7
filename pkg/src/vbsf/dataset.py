"""On-disk dataset format and patch-corpus construction.

A dataset directory holds zero-padded binary PGM frames
(``frame_000000.pgm``), one ``annotations.csv`` with header
``frame,x,y,w,h,kind``, and a ``manifest.json`` carrying
width/height/frame_count/seed. The round trip is lossless.
"""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from vbsf.background import BackgroundModel
from vbsf.detector import LabeledPatch, extract_features
from vbsf.frames import Frame
from vbsf.geometry import BoundingBox, iou
from vbsf.synth import AnnotatedSequence, ObjectKind

FRAME_NAME = "frame_{:06d}.pgm"
ANNOTATIONS_NAME = "annotations.csv"
MANIFEST_NAME = "manifest.json"


def write_pgm(path, pixels: np.ndarray) -> None:
    """Binary (P5) PGM, maxval 255."""
    if pixels.dtype != np.uint8 or pixels.ndim != 2:
        raise ValueError("PGM output needs a 2D uint8 array")
    h, w = pixels.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(pixels.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", data)
    if not m:
        raise ValueError(f"{path}: not a binary PGM file")
    w, h, maxval = int(m.group(1)), int(m.group(2)), int(m.group(3))
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    raster = data[m.end() :]
    if len(raster) != w * h:
        raise ValueError(f"{path}: raster size {len(raster)} != {w}x{h}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).copy()


def write_dataset(seq: AnnotatedSequence, directory, seed: int | None = None) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if not seq.frames:
        raise ValueError("cannot write an empty sequence")
    first = seq.frames[0]
    manifest = {
        "width": first.width,
        "height": first.height,
        "frame_count": len(seq.frames),
        "seed": seed,
    }
    (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    for frame in seq.frames:
        write_pgm(directory / FRAME_NAME.format(frame.index), frame.pixels)
    with open(directory / ANNOTATIONS_NAME, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["frame", "x", "y", "w", "h", "kind"])
        for i, per_frame in enumerate(seq.annotations):
            for box, kind in per_frame:
                writer.writerow([i, repr(box.x), repr(box.y), repr(box.w), repr(box.h), kind.value])


def read_dataset(directory) -> AnnotatedSequence:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise FileNotFoundError(f"{directory}: missing {MANIFEST_NAME}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    frame_count = int(manifest["frame_count"])

    frames = []
    for i in range(frame_count):
        path = directory / FRAME_NAME.format(i)
        if not path.exists():
            raise FileNotFoundError(f"{directory}: missing frame file {path.name}")
        pixels = read_pgm(path)
        if pixels.shape != (manifest["height"], manifest["width"]):
            raise ValueError(f"{path.name}: shape {pixels.shape} contradicts the manifest")
        frames.append(Frame(pixels=pixels, index=i, timestamp=float(i)))

    annotations: list[list[tuple[BoundingBox, ObjectKind]]] = [[] for _ in range(frame_count)]
    ann_path = directory / ANNOTATIONS_NAME
    if not ann_path.exists():
        raise FileNotFoundError(f"{directory}: missing {ANNOTATIONS_NAME}")
    with open(ann_path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        for row in reader:
            idx = int(row["frame"])
            if not (0 <= idx < frame_count):
                raise ValueError(f"{ANNOTATIONS_NAME}: frame index {idx} out of range")
            box = BoundingBox(float(row["x"]), float(row["y"]), float(row["w"]), float(row["h"]))
            annotations[idx].append((box, ObjectKind(row["kind"])))
    return AnnotatedSequence(frames=frames, annotations=annotations)


def build_patches(
    seq: AnnotatedSequence,
    preprocess=None,
    box_scale: float = 1.0,
    background_boxes_per_frame: int = 1,
    seed: int = 0,
    bg_window: int = 25,
    bg_diff_threshold: int = 30,
    warmup: int = 5,
) -> list[LabeledPatch]:
    """Turn an annotated sequence into labeled feature vectors.

    Positives are drone boxes; negatives are other-kind boxes plus randomly
    sampled background boxes that overlap no annotation. ``preprocess``
    optionally maps each raw frame through the same enhancement the runtime
    pipeline applies (with annotation boxes scaled by ``box_scale`` to
    follow any super-resolution factor). Fill-ratio features use the same
    temporal-median foreground mask the pipeline would see.
    """
    rng = np.random.default_rng(seed)
    model = BackgroundModel(window=bg_window)
    patches: list[LabeledPatch] = []
    for frame, per_frame in zip(seq.frames, seq.annotations):
        proc = preprocess(frame) if preprocess is not None else frame
        model.update(proc)
        mask = None
        if len(model) >= warmup:
            mask = model.foreground_mask(proc, bg_diff_threshold)
        boxes = [(box.scale(box_scale), kind) for box, kind in per_frame]
        for box, kind in boxes:
            features = extract_features(proc, box, mask)
            patches.append(LabeledPatch(features=features, label=int(kind is ObjectKind.DRONE)))
        for _ in range(background_boxes_per_frame):
            bg_box = _sample_background_box(rng, proc.width, proc.height, [b for b, _ in boxes])
            if bg_box is not None:
                patches.append(
                    LabeledPatch(features=extract_features(proc, bg_box, mask), label=0)
                )
    return patches


def _sample_background_box(rng, width, height, occupied, attempts: int = 20):
    """A random box overlapping none of the occupied boxes, or None."""
    for _ in range(attempts):
        w = float(rng.integers(8, max(9, width // 4)))
        h = float(rng.integers(8, max(9, height // 4)))
        if w >= width or h >= height:
            continue
        x = float(rng.uniform(0, width - w))
        y = float(rng.uniform(0, height - h))
        candidate = BoundingBox(x, y, w, h)
        if all(iou(candidate, b) == 0.0 for b in occupied):
            return candidate
    return None
