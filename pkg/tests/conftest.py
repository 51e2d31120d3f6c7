"""Shared fixtures: trained classifiers and synthetic scenes are expensive,
so they are built once per session."""

import numpy as np
import pytest

from vbsf.dataset import build_patches
from vbsf.detector import default_training_config, train
from vbsf.pipeline import PipelineConfig, ScheduleConfig, preprocess_frame
from vbsf.synth import (
    FlatBackground,
    ObjectKind,
    ObjectSpec,
    SceneConfig,
    render_sequence,
)


def training_scene(seed: int) -> SceneConfig:
    """Mixed drone/bird/plane scene used to build the training corpus."""
    objects = [
        ObjectSpec(ObjectKind.DRONE, size=16, start=(30, 30), velocity=(1.0, 0.3), intensity=200),
        ObjectSpec(ObjectKind.BIRD, size=16, start=(100, 60), velocity=(-1.0, -0.2), intensity=200),
        ObjectSpec(ObjectKind.PLANE, size=18, start=(60, 20), velocity=(0.5, 0.6), intensity=180),
    ]
    return SceneConfig(
        width=160,
        height=120,
        frame_count=60,
        background=FlatBackground(50),
        objects=objects,
        noise_sigma=2.0,
        seed=seed,
    )


def single_window_config() -> PipelineConfig:
    """Pipeline defaults with one unbounded acquisition window, one virtual
    second per frame, so a whole dataset streams through in one run."""
    return PipelineConfig(
        clock="virtual",
        clock_step=1.0,
        schedule=ScheduleConfig(window_duration=1e9, wait_duration=1.0, cycles=1),
    )


@pytest.fixture(scope="session")
def pipeline_classifier():
    """Classifier trained on pipeline-preprocessed patches from three mixed
    scenes; used by the end-to-end pipeline and acceptance tests."""
    cfg = single_window_config()
    patches = []
    for seed in range(3):
        seq = render_sequence(training_scene(seed))
        patches += build_patches(
            seq,
            preprocess=lambda f: preprocess_frame(f, cfg),
            box_scale=float(cfg.sr_factor),
            seed=seed,
        )
    clf, loss_history, acc_history = train(patches, default_training_config(seed=0, iterations=50))
    return clf


@pytest.fixture(scope="session")
def separable_patches():
    """A linearly separable toy corpus: positives at +1 and negatives at -1
    on the first feature coordinate, zeros elsewhere."""
    from vbsf.detector import FEATURE_DIM, LabeledPatch

    patches = []
    for sign, label in ((1.0, 1), (-1.0, 0)):
        for _ in range(10):
            features = np.zeros(FEATURE_DIM)
            features[0] = sign
            patches.append(LabeledPatch(features=features, label=label))
    return patches
