import pytest

from vbsf.geometry import BoundingBox, Detection
from vbsf.validation import (
    AlertEvent,
    TrackState,
    ValidatorConfig,
    alert_decision,
    check_consistency,
    match_boxes,
    match_detections,
    offline_validate,
)


def det(x, y, w, h, score=0.9):
    return Detection(BoundingBox(x, y, w, h), score)


class TestMatching:
    def test_identical_lists_all_matched(self):
        a = [det(0, 0, 10, 10), det(20, 20, 5, 5)]
        matches = match_detections(a, list(a), threshold=0.9)
        assert sorted((i, j) for i, j, _ in matches) == [(0, 0), (1, 1)]

    def test_disjoint_no_matches(self):
        a = [det(0, 0, 4, 4)]
        b = [det(50, 50, 4, 4)]
        assert match_detections(a, b, threshold=0.1) == []

    def test_greedy_prefers_higher_iou(self):
        a = [det(0, 0, 10, 10)]
        b = [det(5, 0, 10, 10), det(0, 0, 10, 10)]
        matches = match_detections(a, b, threshold=0.3)
        assert matches == [(0, 1, 1.0)]

    def test_no_detection_used_twice(self):
        a = [det(0, 0, 10, 10), det(1, 0, 10, 10)]
        b = [det(0, 0, 10, 10)]
        matches = match_detections(a, b, threshold=0.3)
        assert len(matches) == 1

    def test_matched_iou_meets_threshold(self):
        a = [det(0, 0, 10, 10), det(30, 30, 8, 8)]
        b = [det(2, 0, 10, 10), det(31, 30, 8, 8)]
        for _, _, v in match_detections(a, b, threshold=0.5):
            assert v >= 0.5

    def test_accepts_plain_boxes(self):
        matches = match_boxes([BoundingBox(0, 0, 4, 4)], [BoundingBox(0, 0, 4, 4)], 0.9)
        assert matches == [(0, 0, 1.0)]


class TestCheckConsistency:
    def cfg(self):
        return ValidatorConfig()

    def test_empty_detections_reset(self):
        state = TrackState(consecutive_consistent=3)
        assert check_consistency(state, [], self.cfg()) is False
        assert state.consecutive_consistent == 0

    def test_same_box_two_frames_reaches_two(self):
        state = TrackState()
        check_consistency(state, [det(10, 10, 8, 8)], self.cfg())
        assert state.consecutive_consistent == 1
        check_consistency(state, [det(10, 10, 8, 8)], self.cfg())
        assert state.consecutive_consistent == 2

    def test_fast_drift_never_exceeds_one(self):
        # 60% width drift per frame: IoU = 4/16... scaled = 0.25 < 0.5
        state = TrackState()
        for i in range(6):
            check_consistency(state, [det(i * 6.0, 0, 10, 10)], self.cfg())
            assert state.consecutive_consistent <= 1

    def test_counter_increment_bound(self):
        state = TrackState()
        prev = 0
        boxes = [[det(0, 0, 8, 8)], [], [det(0, 0, 8, 8)], [det(1, 0, 8, 8)], [det(50, 0, 8, 8)]]
        for current in boxes:
            check_consistency(state, current, self.cfg())
            assert state.consecutive_consistent <= prev + 1
            prev = state.consecutive_consistent


class TestAlertDecision:
    def cfg(self, m=2, k=10):
        return ValidatorConfig(consecutive_required=m, rearm_after=k)

    def run_frames(self, frames, cfg):
        """frames: list of detection lists; returns emitted events."""
        state = TrackState()
        events = []
        for i, current in enumerate(frames):
            check_consistency(state, current, cfg)
            event = alert_decision(state, cfg, frame_index=i, timestamp=float(i))
            if event:
                events.append(event)
        return events

    def test_single_alert_on_threshold_crossing(self):
        frames = [[det(0, 0, 8, 8)]] * 3
        events = self.run_frames(frames, self.cfg())
        assert len(events) == 1
        assert events[0].frame_index == 1

    def test_latch_holds_for_long_runs(self):
        frames = [[det(0, 0, 8, 8)]] * 100
        events = self.run_frames(frames, self.cfg())
        assert len(events) == 1

    def test_rearm_after_inconsistent_gap(self):
        frames = [[det(0, 0, 8, 8)]] * 5 + [[]] * 10 + [[det(0, 0, 8, 8)]] * 2
        events = self.run_frames(frames, self.cfg())
        assert len(events) == 2
        assert events[1].frame_index == 16

    def test_no_rearm_on_short_gap(self):
        frames = [[det(0, 0, 8, 8)]] * 5 + [[]] * 5 + [[det(0, 0, 8, 8)]] * 4
        events = self.run_frames(frames, self.cfg())
        assert len(events) == 1

    def test_alert_carries_top_detection(self):
        frames = [[det(0, 0, 8, 8, 0.7)], [det(0, 0, 8, 8, 0.95), det(40, 40, 8, 8, 0.6)]]
        events = self.run_frames(frames, self.cfg())
        assert len(events) == 1
        assert events[0].score == 0.95
        assert events[0].timestamp == 1.0

    def test_alert_count_latch_bound(self):
        # alternating bursts can never alert more than ceil(n/(M+K)) + 1 times
        cfg = self.cfg(m=2, k=3)
        frames = []
        for _ in range(20):
            frames += [[det(0, 0, 8, 8)]] * 2 + [[]] * 3
        events = self.run_frames(frames, cfg)
        assert len(events) <= len(frames) // (2 + 3) + 1

    def test_event_json_shape(self):
        event = AlertEvent(frame_index=4, box=BoundingBox(1, 2, 3, 4), score=0.5, timestamp=9.0)
        d = event.to_json_dict()
        assert d == {
            "frame": 4,
            "timestamp": 9.0,
            "box": {"x": 1.0, "y": 2.0, "w": 3.0, "h": 4.0},
            "score": 0.5,
        }


class TestOfflineValidate:
    def cfg(self):
        return ValidatorConfig(offline_iou_threshold=0.9)

    def test_perfect_predictions(self):
        gt = [[BoundingBox(0, 0, 10, 10)] for _ in range(5)]
        preds = [[det(0, 0, 10, 10)] for _ in range(5)]
        report = offline_validate(preds, gt, self.cfg())
        assert report.pass_rate == 1.0
        assert all(report.frame_pass)

    def test_one_miss_in_ten(self):
        gt = [[BoundingBox(0, 0, 10, 10)] for _ in range(10)]
        preds = [[det(0, 0, 10, 10)] for _ in range(9)] + [[]]
        report = offline_validate(preds, gt, self.cfg())
        assert report.pass_rate == pytest.approx(0.9)

    def test_false_positive_fails_frame(self):
        n = 8
        gt = [[] for _ in range(n)]
        preds = [[] for _ in range(n)]
        preds[3] = [det(0, 0, 5, 5)]
        report = offline_validate(preds, gt, self.cfg())
        assert report.pass_rate == pytest.approx((n - 1) / n)

    def test_empty_frames_pass(self):
        report = offline_validate([[]], [[]], self.cfg())
        assert report.pass_rate == 1.0

    def test_frame_count_mismatch(self):
        with pytest.raises(ValueError):
            offline_validate([[]], [[], []], self.cfg())

    def test_adding_failing_frame_never_raises_rate(self):
        gt = [[BoundingBox(0, 0, 10, 10)]] * 4
        preds = [[det(0, 0, 10, 10)]] * 4
        base = offline_validate(preds, gt, self.cfg()).pass_rate
        worse = offline_validate(preds + [[]], gt + [[BoundingBox(0, 0, 4, 4)]], self.cfg()).pass_rate
        assert worse <= base

    def test_csv_report(self, tmp_path):
        gt = [[BoundingBox(0, 0, 10, 10)], []]
        preds = [[det(0, 0, 10, 10)], []]
        report = offline_validate(preds, gt, self.cfg())
        path = tmp_path / "report.csv"
        report.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "frame,pass,best_iou"
        assert lines[1].startswith("0,1,")
        assert lines[-1].startswith("pass_rate,")
