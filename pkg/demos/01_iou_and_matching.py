"""Box geometry basics: IoU, intersection, and greedy matching.

Run: python3 demos/01_iou_and_matching.py
"""

from vbsf.geometry import BoundingBox, box_intersection, iou
from vbsf.validation import match_boxes

a = BoundingBox(x=10, y=10, w=20, h=20)
b = BoundingBox(x=20, y=10, w=20, h=20)

print(f"a = {a}")
print(f"b = {b}")
print(f"intersection = {box_intersection(a, b)}")
print(f"iou(a, b)    = {iou(a, b):.4f}")
print(f"iou(a, a)    = {iou(a, a):.4f}")
print()

# Greedy matching pairs each ground-truth box with the best remaining
# prediction whose IoU clears the threshold; no box is used twice.
ground_truth = [BoundingBox(10, 10, 20, 20), BoundingBox(60, 40, 16, 16)]
predictions = [
    BoundingBox(11, 10, 20, 20),  # near-perfect match for the first box
    BoundingBox(58, 42, 16, 16),  # decent match for the second
    BoundingBox(100, 5, 10, 10),  # spurious
]

matches = match_boxes(ground_truth, predictions, threshold=0.5)
for gt_idx, pred_idx, value in matches:
    print(f"ground truth #{gt_idx} <-> prediction #{pred_idx}: IoU {value:.3f}")
unmatched = set(range(len(predictions))) - {j for _, j, _ in matches}
print(f"unmatched predictions: {sorted(unmatched)}")
