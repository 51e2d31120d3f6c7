import json

import pytest

from vbsf.cli import main


def write_scene_config(path, objects, frame_count=30, seed=1):
    path.write_text(
        json.dumps(
            {
                "width": 96,
                "height": 72,
                "frame_count": frame_count,
                "background": {"type": "flat", "level": 40},
                "objects": objects,
                "noise_sigma": 2.0,
                "seed": seed,
            }
        )
    )


DRONE = {"kind": "drone", "size": 12, "start": [10, 10], "velocity": [1.5, 0.5]}
BIRD = {"kind": "bird", "size": 12, "start": [70, 50], "velocity": [-1.0, 0.0]}


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """synth -> train once; downstream commands reuse the artifacts."""
    root = tmp_path_factory.mktemp("cli")
    cfg = root / "scene.json"
    write_scene_config(cfg, [DRONE, BIRD])
    assert main(["synth", "--config", str(cfg), "--out", str(root / "data")]) == 0
    assert (
        main(
            [
                "train",
                "--data", str(root / "data"),
                "--out", str(root / "model.vbsf"),
                "--iterations", "10",
            ]
        )
        == 0
    )
    return root


class TestSynth:
    def test_writes_dataset(self, workspace):
        assert (workspace / "data" / "manifest.json").exists()
        assert (workspace / "data" / "frame_000000.pgm").exists()
        assert (workspace / "data" / "annotations.csv").exists()

    def test_bad_config_field_exits_1(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"widht": 32}))
        assert main(["synth", "--config", str(cfg), "--out", str(tmp_path / "d")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_malformed_json_exits_1(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{not json")
        assert main(["synth", "--config", str(cfg), "--out", str(tmp_path / "d")]) == 1


class TestTrain:
    def test_artifacts_written(self, workspace):
        assert (workspace / "model.vbsf").exists()
        assert (workspace / "model_loss.csv").exists()
        assert (workspace / "model_loss.svg").exists()
        assert (workspace / "model_accuracy.svg").exists()

    def test_single_class_data_exits_1(self, tmp_path, capsys):
        cfg = tmp_path / "scene.json"
        # background-only frames yield only negative patches
        write_scene_config(cfg, [], frame_count=10)
        assert main(["synth", "--config", str(cfg), "--out", str(tmp_path / "d")]) == 0
        code = main(["train", "--data", str(tmp_path / "d"), "--out", str(tmp_path / "m.vbsf"), "--iterations", "5"])
        assert code == 1
        assert "single-class" in capsys.readouterr().err

    def test_missing_dataset_exits_1(self, tmp_path):
        code = main(["train", "--data", str(tmp_path / "nope"), "--out", str(tmp_path / "m.vbsf")])
        assert code == 1


class TestEvaluate:
    def test_reports_written(self, workspace):
        out = workspace / "eval"
        code = main(
            [
                "evaluate",
                "--data", str(workspace / "data"),
                "--model", str(workspace / "model.vbsf"),
                "--out", str(out),
            ]
        )
        assert code == 0
        assert (out / "metrics.csv").exists()
        assert (out / "roc.csv").exists()
        assert (out / "roc.svg").exists()

    def test_kfold_report(self, workspace):
        out = workspace / "eval_cv"
        code = main(
            [
                "evaluate",
                "--data", str(workspace / "data"),
                "--model", str(workspace / "model.vbsf"),
                "--out", str(out),
                "--kfold", "2",
            ]
        )
        assert code == 0
        assert (out / "crossval.csv").exists()


class TestValidate:
    def test_perfect_predictions_pass(self, workspace, capsys):
        # feed the ground truth back as predictions: pass rate must be 1
        ann = (workspace / "data" / "annotations.csv").read_text().splitlines()
        pred = workspace / "pred.csv"
        rows = ["frame,x,y,w,h"] + [",".join(line.split(",")[:5]) for line in ann[1:]]
        pred.write_text("\n".join(rows) + "\n")
        code = main(
            [
                "validate",
                "--pred", str(pred),
                "--gt", str(workspace / "data"),
                "--out", str(workspace / "validation.csv"),
            ]
        )
        assert code == 0
        assert "pass_rate 1.0000" in capsys.readouterr().out
        assert (workspace / "validation.csv").exists()

    def test_missing_columns_exits_1(self, workspace, tmp_path):
        pred = tmp_path / "pred.csv"
        pred.write_text("frame,x,y\n0,1,2\n")
        code = main(["validate", "--pred", str(pred), "--gt", str(workspace / "data"), "--out", str(tmp_path / "v.csv")])
        assert code == 1


class TestRun:
    def test_virtual_clock_run(self, workspace, capsys):
        report_path = workspace / "report.json"
        code = main(
            [
                "run",
                "--data", str(workspace / "data"),
                "--model", str(workspace / "model.vbsf"),
                "--virtual-clock", "60",
                "--alert-file", str(workspace / "alerts.jsonl"),
                "--report", str(report_path),
            ]
        )
        assert code == 0
        payload = json.loads(report_path.read_text())
        assert payload["frames_processed"] + payload["frames_skipped_bright"] == 30
        assert "timings_ms" not in payload
        printed = json.loads(capsys.readouterr().out)
        assert printed == payload

    def test_missing_model_exits_1(self, workspace, tmp_path):
        code = main(["run", "--data", str(workspace / "data"), "--model", str(tmp_path / "no.vbsf")])
        assert code == 1


class TestArgs:
    def test_unknown_subcommand_exits_1(self):
        assert main(["frobnicate"]) == 1

    def test_unknown_flag_exits_1(self):
        assert main(["synth", "--config", "x", "--out", "y", "--bogus"]) == 1

    def test_no_args_exits_1(self):
        assert main([]) == 1
