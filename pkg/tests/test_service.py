"""HTTP endpoints: payload contracts and error mapping."""
import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from fogsim import __version__, evaluate, load_mot_file, write_mot_file
from fogsim.service import create_app

from conftest import build_sequence, random_tracking_instance


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestHealth:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok", "version": __version__}


class TestAttenuation:
    def test_from_visibility(self, client):
        response = client.post("/attenuation", json={"visibility": 1000.0})
        assert response.status_code == 200
        body = response.json()
        assert body["beta"] == pytest.approx(-math.log(0.05) / 1000.0, abs=1e-15)
        assert body["visibility"] == 1000.0
        assert body["level"] is None

    def test_from_level(self, client):
        response = client.post("/attenuation", json={"level": 3})
        assert response.status_code == 200
        body = response.json()
        assert body["beta"] == 4.0
        assert body["level"] == 3

    def test_neither_is_422(self, client):
        response = client.post("/attenuation", json={})
        assert response.status_code == 422
        assert "exactly one" in response.json()["detail"]

    def test_both_is_422(self, client):
        response = client.post(
            "/attenuation", json={"visibility": 100.0, "level": 2}
        )
        assert response.status_code == 422

    def test_bad_level_is_400(self, client):
        response = client.post("/attenuation", json={"level": 7})
        assert response.status_code == 400

    def test_bad_visibility_is_400(self, client):
        response = client.post("/attenuation", json={"visibility": -5.0})
        assert response.status_code == 400


class TestCalibration:
    def test_coefficients(self, client):
        response = client.post(
            "/calibration", json={"d_min": 2.0, "d_max": 50.0}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["scale"] == pytest.approx(1 / 2.0 - 1 / 50.0, abs=1e-15)
        assert body["shift"] == pytest.approx(1 / 50.0, abs=1e-15)

    def test_inverted_range_is_400(self, client):
        response = client.post(
            "/calibration", json={"d_min": 50.0, "d_max": 2.0}
        )
        assert response.status_code == 400


class TestRender:
    def test_renders_dataset(self, client, dataset_factory, tmp_path):
        root = dataset_factory(n_seqs=2, n_frames=2)
        response = client.post(
            "/render",
            json={
                "input_dir": str(root),
                "output_dir": str(tmp_path / "out"),
                "config": {"level": 2, "seed": 5},
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["n_rendered"] == 2
        assert body["n_failed"] == 0
        names = [o["name"] for o in body["outcomes"]]
        assert names == ["SEQ-01", "SEQ-02"]
        assert all(o["status"] == "rendered" for o in body["outcomes"])
        assert (tmp_path / "out" / "SEQ-01" / "manifest.txt").is_file()

    def test_partial_failure_is_reported(self, client, dataset_factory, tmp_path):
        import shutil

        root = dataset_factory(n_seqs=2, n_frames=2)
        shutil.rmtree(root / "SEQ-02" / "depth")
        response = client.post(
            "/render",
            json={
                "input_dir": str(root),
                "output_dir": str(tmp_path / "out"),
                "config": {"level": 1},
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["n_rendered"] == 1
        assert body["n_failed"] == 1
        failed = [o for o in body["outcomes"] if o["status"] == "failed"]
        assert failed[0]["name"] == "SEQ-02"
        assert "depth" in failed[0]["error"]

    def test_missing_root_is_404(self, client, tmp_path):
        response = client.post(
            "/render",
            json={
                "input_dir": str(tmp_path / "nope"),
                "output_dir": str(tmp_path / "out"),
                "config": {"level": 1},
            },
        )
        assert response.status_code == 404

    def test_invalid_config_is_422(self, client, tmp_path):
        response = client.post(
            "/render",
            json={
                "input_dir": str(tmp_path),
                "output_dir": str(tmp_path / "out"),
                "config": {"level": 1, "visibility": 100.0},
            },
        )
        assert response.status_code == 422

    def test_schema_violation_is_422(self, client):
        response = client.post("/render", json={"input_dir": "x"})
        assert response.status_code == 422


class TestEvaluate:
    def test_matches_library(self, client, tmp_path):
        rng = np.random.default_rng(11)
        gt, predictions = random_tracking_instance(rng)
        gt_path = tmp_path / "gt.txt"
        res_path = tmp_path / "res.txt"
        write_mot_file(gt_path, gt, kind="gt")
        write_mot_file(res_path, predictions, kind="result")
        response = client.post(
            "/evaluate",
            json={"gt_path": str(gt_path), "results_path": str(res_path)},
        )
        assert response.status_code == 200
        body = response.json()
        report = evaluate(
            load_mot_file(gt_path, kind="gt"),
            load_mot_file(res_path, kind="result"),
        )
        assert body["hota"] == pytest.approx(report.hota, abs=1e-9)
        assert body["mota"] == pytest.approx(report.mota, abs=1e-9)
        assert body["motp"] == pytest.approx(report.motp, abs=1e-9)
        assert body["idf1"] == pytest.approx(report.idf1, abs=1e-9)
        assert body["id_switches"] == report.id_switches
        assert body["gt_count"] == report.gt_count

    def test_missing_gt_is_404(self, client, tmp_path):
        response = client.post(
            "/evaluate",
            json={
                "gt_path": str(tmp_path / "gt.txt"),
                "results_path": str(tmp_path / "res.txt"),
            },
        )
        assert response.status_code == 404

    def test_threshold_bounds_are_schema_checked(self, client, tmp_path):
        response = client.post(
            "/evaluate",
            json={
                "gt_path": str(tmp_path / "gt.txt"),
                "results_path": str(tmp_path / "res.txt"),
                "iou_threshold": 1.5,
            },
        )
        assert response.status_code == 422


class TestSweep:
    def test_rows_and_reports(self, client):
        response = client.post(
            "/sweep",
            json={
                "scene": {"n_objects": 2, "n_frames": 12, "seed": 3},
                "levels": [1, 4],
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert [r["label"] for r in body["rows"]] == ["clear", "fog-1", "fog-4"]
        assert body["csv"].startswith("scene,hota,mota,motp,idf1,id_switches")
        assert body["markdown"].count("|") > 0
        assert body["rows"][0]["mota"] == 100.0

    def test_unknown_level_is_422(self, client):
        response = client.post(
            "/sweep",
            json={
                "scene": {"n_objects": 1, "n_frames": 5},
                "levels": [6],
            },
        )
        assert response.status_code == 422

    def test_bad_mode_is_422(self, client):
        response = client.post(
            "/sweep",
            json={
                "scene": {"n_objects": 1, "n_frames": 5},
                "mode": "banded",
            },
        )
        assert response.status_code == 422

    def test_impossible_scene_is_400(self, client):
        response = client.post(
            "/sweep",
            json={
                "scene": {
                    "n_objects": 1,
                    "n_frames": 90,
                    "motion": [[50.0, 0.0]],
                },
            },
        )
        assert response.status_code == 400
