"""Drone detection from frame streams.

Building blocks: box geometry and IoU, frame preprocessing, temporal-median
background subtraction with connected-component proposals, a swarm-optimized
sigmoid patch classifier, temporal consistency validation with alerting,
evaluation metrics, and a synthetic ground-truthed scene generator.
"""

from vbsf.geometry import BoundingBox, Detection, Label, box_area, box_intersection, iou

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "Detection",
    "Label",
    "box_area",
    "box_intersection",
    "iou",
    "__version__",
]
