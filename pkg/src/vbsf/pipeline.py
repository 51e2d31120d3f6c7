"""Frame-loop orchestration: scheduled acquisition windows, the stage chain
(brightness gate, grayscale, super-resolution, denoise/dehaze, background
subtraction, detection, consistency validation, alerting), and run reports.

Processing happens only on frames below the brightness threshold; bright
frames are skipped, matching the night-surveillance loop this reproduces.
``enhance_always`` overrides that gate so every frame is processed.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field, asdict

from vbsf.alerts import AlertDispatcher, DeliveryRecord
from vbsf.background import BackgroundModel, connected_components
from vbsf.detector import SigmoidClassifier, detect
from vbsf.frames import Frame
from vbsf.geometry import Detection
from vbsf.preprocess import (
    Resample,
    dehaze_stretch,
    denoise_median,
    mean_brightness,
    nightvision_grayscale,
    upscale,
)
from vbsf.validation import AlertEvent, TrackState, ValidatorConfig, alert_decision, check_consistency

log = logging.getLogger("vbsf.pipeline")


class WallClock:
    def now(self) -> float:
        return time.monotonic()

    def sleep(self, seconds: float) -> None:
        time.sleep(seconds)

    def advance_frame(self) -> None:
        pass  # wall time passes on its own


class VirtualClock:
    """Deterministic clock: time advances ``step`` seconds per frame and
    jumps instantly over waits, so scheduled runs finish in milliseconds."""

    def __init__(self, step: float):
        if step <= 0:
            raise ValueError("virtual clock step must be > 0")
        self.step = step
        self._t = 0.0

    def now(self) -> float:
        return self._t

    def sleep(self, seconds: float) -> None:
        self._t += seconds

    def advance_frame(self) -> None:
        self._t += self.step


@dataclass
class ScheduleConfig:
    window_duration: float = 600.0  # seconds of acquisition per cycle
    wait_duration: float = 1800.0  # seconds between cycles
    cycles: int = 10

    def __post_init__(self):
        if self.window_duration <= 0 or self.wait_duration <= 0:
            raise ValueError("schedule durations must be > 0")
        if self.cycles < 1:
            raise ValueError("schedule cycles must be >= 1")


@dataclass
class PipelineConfig:
    brightness_threshold: float = 0.35
    enhance_always: bool = False
    sr_factor: int = 2
    sr_method: Resample = Resample.LANCZOS3
    denoise_radius: int = 1
    dehaze_low_pct: float = 1.0
    dehaze_high_pct: float = 99.0
    dehaze_min_spread: float = 128.0  # skip the stretch below this spread (caps noise gain at 2x)
    bg_window: int = 25
    bg_diff_threshold: int = 30
    bg_min_area: int = 25
    bg_warmup: int = 5
    score_threshold: float = 0.5
    alert_backoff: float = 1.0
    validator: ValidatorConfig = field(default_factory=ValidatorConfig)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    clock: str = "wall"  # "wall" or "virtual"
    clock_step: float = 60.0  # seconds per frame under the virtual clock

    def make_clock(self):
        if self.clock == "wall":
            return WallClock()
        if self.clock == "virtual":
            return VirtualClock(self.clock_step)
        raise ValueError(f"unknown clock {self.clock!r}")


def config_from_json(path) -> PipelineConfig:
    """Load a pipeline config, rejecting unknown fields (typo guard)."""
    with open(path, encoding="utf-8") as f:
        raw = json.load(f)
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> PipelineConfig:
    known = {f for f in PipelineConfig.__dataclass_fields__}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown pipeline config fields: {sorted(unknown)}")
    kwargs = dict(raw)
    if "sr_method" in kwargs:
        kwargs["sr_method"] = Resample(kwargs["sr_method"])
    if "validator" in kwargs:
        vknown = set(ValidatorConfig.__dataclass_fields__)
        vunknown = set(kwargs["validator"]) - vknown
        if vunknown:
            raise ValueError(f"unknown validator config fields: {sorted(vunknown)}")
        kwargs["validator"] = ValidatorConfig(**kwargs["validator"])
    if "schedule" in kwargs:
        sknown = set(ScheduleConfig.__dataclass_fields__)
        sunknown = set(kwargs["schedule"]) - sknown
        if sunknown:
            raise ValueError(f"unknown schedule config fields: {sorted(sunknown)}")
        kwargs["schedule"] = ScheduleConfig(**kwargs["schedule"])
    return PipelineConfig(**kwargs)


@dataclass
class RunReport:
    frames_processed: int = 0
    frames_skipped_bright: int = 0
    frames_decode_errors: int = 0
    detections_total: int = 0
    windows_completed: int = 0
    alerts: list[AlertEvent] = field(default_factory=list)
    deliveries: list[DeliveryRecord] = field(default_factory=list)
    alerts_dropped: int = 0
    timings_ms: dict[str, float] | None = None  # wall clock only
    # per-frame detections in source coordinates, for offline validation;
    # not part of the JSON report
    frame_detections: dict[int, list[Detection]] = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "frames_processed": self.frames_processed,
            "frames_skipped_bright": self.frames_skipped_bright,
            "frames_decode_errors": self.frames_decode_errors,
            "detections_total": self.detections_total,
            "windows_completed": self.windows_completed,
            "alerts": [a.to_json_dict() for a in self.alerts],
            "deliveries": [asdict(d) for d in self.deliveries],
            "alerts_dropped": self.alerts_dropped,
        }
        if self.timings_ms is not None:
            payload["timings_ms"] = {k: round(v, 3) for k, v in self.timings_ms.items()}
        return json.dumps(payload, indent=2, sort_keys=True)


def preprocess_frame(frame: Frame, cfg: PipelineConfig) -> Frame:
    """The enhancement chain applied to every processed frame: night-vision
    grayscale, super-resolution, median denoise, percentile dehaze."""
    proc = nightvision_grayscale(frame)
    proc = upscale(proc, cfg.sr_factor, cfg.sr_method)
    proc = denoise_median(proc, cfg.denoise_radius)
    return dehaze_stretch(proc, cfg.dehaze_low_pct, cfg.dehaze_high_pct, cfg.dehaze_min_spread)


def schedule_loop(schedule: ScheduleConfig, body, clock) -> int:
    """Run ``body(cycle_index, window_open)`` once per cycle, where
    ``window_open()`` stays true until the window duration elapses on the
    clock. Waits between cycles. Body may return False to stop early.
    Returns the number of cycles executed."""
    executed = 0
    for cycle in range(schedule.cycles):
        start = clock.now()

        def window_open():
            return clock.now() - start < schedule.window_duration

        keep_going = body(cycle, window_open)
        executed += 1
        if keep_going is False:
            break
        if cycle < schedule.cycles - 1:
            clock.sleep(schedule.wait_duration)
    return executed


def run_pipeline(
    source,
    cfg: PipelineConfig,
    classifier: SigmoidClassifier,
    sinks=(),
    clock=None,
) -> RunReport:
    """Drive the full detection loop over a frame source.

    ``source`` is any iterable of Frame in index order. Frames are consumed
    within scheduled acquisition windows until the schedule completes or the
    source ends. Alert delivery happens on a background dispatcher and never
    stalls or alters detection.
    """
    if clock is None:
        clock = cfg.make_clock()
    wall = isinstance(clock, WallClock)
    report = RunReport(timings_ms={} if wall else None)
    bg = BackgroundModel(window=cfg.bg_window)
    track = TrackState()
    dispatcher = AlertDispatcher(sinks, backoff_base=cfg.alert_backoff) if sinks else None
    it = iter(source)
    exhausted = False

    def timed(stage, fn, *args, **kwargs):
        if not wall:
            return fn(*args, **kwargs)
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        report.timings_ms[stage] = report.timings_ms.get(stage, 0.0) + (time.perf_counter() - t0) * 1e3
        return out

    def process(frame: Frame) -> None:
        brightness = timed("brightness", mean_brightness, frame)
        if brightness >= cfg.brightness_threshold and not cfg.enhance_always:
            report.frames_skipped_bright += 1
            return
        proc = timed("enhance", preprocess_frame, frame, cfg)
        bg.update(proc)
        detections: list[Detection] = []
        if len(bg) >= cfg.bg_warmup:
            mask = timed("background", bg.foreground_mask, proc, cfg.bg_diff_threshold)
            proposals = timed("proposals", connected_components, mask, cfg.bg_min_area)
            raw = timed("detect", detect, proc, proposals, classifier, cfg.score_threshold, mask)
            inv = 1.0 / cfg.sr_factor
            detections = [Detection(d.box.scale(inv), d.score, d.label) for d in raw]
        report.frames_processed += 1
        report.detections_total += len(detections)
        report.frame_detections[frame.index] = detections
        timed("validate", check_consistency, track, detections, cfg.validator)
        event = alert_decision(track, cfg.validator, frame.index, frame.timestamp)
        if event is not None:
            report.alerts.append(event)
            log.info("alert at frame %d (score %.3f)", event.frame_index, event.score)
            if dispatcher is not None:
                dispatcher.submit(event)

    def window_body(cycle, window_open):
        nonlocal exhausted
        while window_open():
            try:
                frame = next(it)
            except StopIteration:
                exhausted = True
                return False
            except (ValueError, OSError) as exc:
                log.warning("frame decode error, skipping: %s", exc)
                report.frames_decode_errors += 1
                clock.advance_frame()
                continue
            process(frame)
            clock.advance_frame()
        return True

    report.windows_completed = schedule_loop(cfg.schedule, window_body, clock)
    if dispatcher is not None:
        report.deliveries = dispatcher.close()
        report.alerts_dropped = dispatcher.dropped
    return report
