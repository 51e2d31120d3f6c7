"""Command-line surface: synth, train, evaluate, validate, run.

Exit status: 0 on success, 1 on validation/config errors, 2 on runtime
failure. VBSF_LOG (error|warn|info|debug) controls verbosity.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np
from scipy.special import expit

from vbsf import dataset as ds
from vbsf import metrics as mt
from vbsf import synth
from vbsf.alerts import file_sink, webhook_sink
from vbsf.detector import (
    default_training_config,
    load_classifier,
    save_classifier,
    train,
)
from vbsf.geometry import BoundingBox, Detection
from vbsf.pipeline import PipelineConfig, VirtualClock, config_from_json, preprocess_frame, run_pipeline
from vbsf.plotting import save_line_plot, save_roc_plot
from vbsf.validation import ValidatorConfig, offline_validate

log = logging.getLogger("vbsf.cli")

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = os.environ.get("VBSF_LOG", "warn").lower()
    logging.basicConfig(level=_LOG_LEVELS.get(level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _scene_config_from_json(path) -> synth.SceneConfig:
    with open(path, encoding="utf-8") as f:
        raw = json.load(f)
    known = {"width", "height", "frame_count", "background", "objects", "noise_sigma", "seed"}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown scene config fields: {sorted(unknown)}")
    background = raw.get("background", {"type": "flat"})
    btype = background.get("type", "flat")
    if btype == "flat":
        bg = synth.FlatBackground(level=background.get("level", 50))
    elif btype == "gradient":
        bg = synth.GradientBackground(low=background.get("low", 20), high=background.get("high", 120))
    elif btype == "noisy_flat":
        bg = synth.NoisyFlatBackground(level=background.get("level", 50), sigma=background.get("sigma", 3.0))
    else:
        raise ValueError(f"unknown background type {btype!r}")
    objects = [
        synth.ObjectSpec(
            kind=synth.ObjectKind(o["kind"]),
            size=o["size"],
            start=tuple(o["start"]),
            velocity=tuple(o.get("velocity", (0.0, 0.0))),
            intensity=o.get("intensity", 200),
            appear=o.get("appear", 0),
        )
        for o in raw.get("objects", [])
    ]
    return synth.SceneConfig(
        width=raw.get("width", 128),
        height=raw.get("height", 96),
        frame_count=raw.get("frame_count", 100),
        background=bg,
        objects=objects,
        noise_sigma=raw.get("noise_sigma", 0.0),
        seed=raw.get("seed", 0),
    )


def _cmd_synth(args) -> int:
    cfg = _scene_config_from_json(args.config)
    seq = synth.render_sequence(cfg)
    ds.write_dataset(seq, args.out, seed=cfg.seed)
    print(f"wrote {len(seq.frames)} frames to {args.out}")
    return 0


def _collect_patches(data_dirs, pipeline_cfg: PipelineConfig | None, seed: int):
    patches = []
    for i, d in enumerate(data_dirs):
        seq = ds.read_dataset(d)
        if pipeline_cfg is None:
            patches += ds.build_patches(seq, seed=seed + i)
        else:
            patches += ds.build_patches(
                seq,
                preprocess=lambda f: preprocess_frame(f, pipeline_cfg),
                box_scale=float(pipeline_cfg.sr_factor),
                seed=seed + i,
                bg_window=pipeline_cfg.bg_window,
                bg_diff_threshold=pipeline_cfg.bg_diff_threshold,
                warmup=pipeline_cfg.bg_warmup,
            )
    return patches


def _cmd_train(args) -> int:
    pipeline_cfg = config_from_json(args.pipeline_config) if args.pipeline_config else PipelineConfig()
    patches = _collect_patches(args.data, pipeline_cfg, seed=args.pso_seed)
    cfg = default_training_config(seed=args.pso_seed, iterations=args.iterations)
    clf, loss_history, acc_history = train(patches, cfg)
    save_classifier(clf, args.out)

    out = Path(args.out)
    stem = out.with_suffix("")
    with open(f"{stem}_loss.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["iteration", "loss", "accuracy"])
        for i, (l, a) in enumerate(zip(loss_history, acc_history)):
            writer.writerow([i, repr(l), repr(a)])
    save_line_plot(f"{stem}_loss.svg", {"loss": loss_history}, "iteration", "BCE loss", "Training loss")
    save_line_plot(f"{stem}_accuracy.svg", {"accuracy": acc_history}, "iteration", "accuracy", "Training accuracy")
    print(f"trained on {len(patches)} patches; final loss {loss_history[-1]:.6f}, "
          f"accuracy {acc_history[-1]:.4f}; model at {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    pipeline_cfg = config_from_json(args.pipeline_config) if args.pipeline_config else PipelineConfig()
    patches = _collect_patches([args.data], pipeline_cfg, seed=args.seed)
    labels = np.array([p.label for p in patches])
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    clf = load_classifier(args.model)
    X = np.stack([p.features for p in patches])
    scores = expit(X @ clf.weights + clf.bias)
    m = mt.metrics(mt.confusion(scores, labels, 0.5))
    with open(out_dir / "metrics.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["accuracy", "precision", "recall", "f1"])
        writer.writerow([repr(m.accuracy), repr(m.precision), repr(m.recall), repr(m.f1)])
    curve = mt.roc(scores, labels)
    mt.roc_to_csv(curve, out_dir / "roc.csv")
    save_roc_plot(out_dir / "roc.svg", curve.points, curve.auc)
    print(f"accuracy {m.accuracy:.4f} precision {m.precision:.4f} "
          f"recall {m.recall:.4f} f1 {m.f1:.4f} auc {curve.auc:.4f}")

    if args.kfold:
        result = mt.cross_validate(patches, k=args.kfold, seed=args.seed)
        result.to_csv(out_dir / "crossval.csv")
        print(f"{args.kfold}-fold accuracy {result.mean('accuracy'):.4f} "
              f"+/- {result.stdev('accuracy'):.4f}")
    return 0


def _read_predictions_csv(path, frame_count: int) -> list[list[Detection]]:
    preds: list[list[Detection]] = [[] for _ in range(frame_count)]
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        required = {"frame", "x", "y", "w", "h"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ValueError(f"{path}: prediction CSV needs columns {sorted(required)}")
        for row in reader:
            idx = int(row["frame"])
            if not (0 <= idx < frame_count):
                raise ValueError(f"{path}: frame index {idx} out of range")
            box = BoundingBox(float(row["x"]), float(row["y"]), float(row["w"]), float(row["h"]))
            score = float(row.get("score", 1.0) or 1.0)
            preds[idx].append(Detection(box=box, score=score))
    return preds


def _cmd_validate(args) -> int:
    seq = ds.read_dataset(args.gt)
    gt_boxes = [[box for box, _ in per_frame] for per_frame in seq.annotations]
    preds = _read_predictions_csv(args.pred, len(seq.frames))
    cfg = ValidatorConfig(offline_iou_threshold=args.threshold)
    report = offline_validate(preds, gt_boxes, cfg)
    report.to_csv(args.out)
    print(f"pass_rate {report.pass_rate:.4f} ({sum(report.frame_pass)}/{len(report.frame_pass)} frames)")
    return 0


def _cmd_run(args) -> int:
    cfg = config_from_json(args.config) if args.config else PipelineConfig()
    if args.virtual_clock is not None:
        cfg.clock = "virtual"
        cfg.clock_step = args.virtual_clock
    seq = ds.read_dataset(args.data)
    clf = load_classifier(args.model)
    sinks = []
    if args.alert_file:
        sinks.append(file_sink(args.alert_file))
    if args.alert_url:
        sinks.append(webhook_sink(args.alert_url))
    report = run_pipeline(seq.frames, cfg, clf, sinks=sinks)
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    print(report.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vbsf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render a synthetic annotated dataset")
    p.add_argument("--config", required=True, help="scene config JSON")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train the patch classifier")
    p.add_argument("--data", action="append", required=True, help="dataset directory (repeatable)")
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("--pso-seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=50)
    p.add_argument("--pipeline-config", help="pipeline config JSON; patches are built "
                   "through the same preprocessing the run command applies")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score a model on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--kfold", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory for CSV/SVG reports")
    p.add_argument("--pipeline-config")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("validate", help="offline ground-truth IoU pass-rate report")
    p.add_argument("--pred", required=True, help="prediction CSV (frame,x,y,w,h[,score])")
    p.add_argument("--gt", required=True, help="ground-truth dataset directory")
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--out", default="validation.csv")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("run", help="full detection pipeline over a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--alert-file")
    p.add_argument("--alert-url")
    p.add_argument("--virtual-clock", type=float, default=None, metavar="STEP",
                   help="use a virtual clock advancing STEP seconds per frame")
    p.add_argument("--report", help="write the run report JSON here")
    p.set_defaults(func=_cmd_run)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        log.exception("runtime failure")
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
