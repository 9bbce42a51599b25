import json
import time

import pytest
from fastapi.testclient import TestClient

from railcab.cli import main
from railcab.dataset import MANIFEST_NAME
from railcab.evaluate import report_json
from railcab.route import save_route
from railcab.service import create_app


@pytest.fixture(scope="module")
def state_dir(tmp_path_factory, small_route):
    """A self-contained service state dir: dataset, model, default weights."""
    root = tmp_path_factory.mktemp("state")
    route_path = root / "short_line.json"
    save_route(small_route, route_path)
    assert main([
        "generate", "--route", str(route_path), "--runs", "4",
        "--seed", "11", "--out", str(root),
    ]) == 0
    assert main([
        "fit", "--manifest", str(root / MANIFEST_NAME),
        "--train-count", "3", "--out", str(root / "model.json"),
    ]) == 0
    return root


@pytest.fixture()
def client(state_dir):
    # reset any weight edits a previous test left behind
    weights_path = state_dir / "weights.json"
    if weights_path.exists():
        weights_path.unlink()
    app = create_app(state_dir)
    with TestClient(app) as test_client:
        yield test_client


def wait_for_job(client, job_id, timeout_s=60.0):
    deadline = time.monotonic() + timeout_s
    while time.monotonic() < deadline:
        record = client.get(f"/api/jobs/{job_id}").json()
        if record["status"] in ("done", "failed"):
            return record
        time.sleep(0.05)
    raise TimeoutError(f"job {job_id} did not finish")


class TestWeightsEndpoint:
    def test_get_returns_default_table(self, client):
        table = client.get("/api/weights").json()
        assert table["Cruise"] == {"T": 135, "S": 150, "SL": 150, "SLS": 0,
                                   "RoA": 10, "ES": 0, "PI": 0}
        assert set(table) == {"Cruise", "AWS", "Engine_Check", "Brake_Change", "Speed_Change"}

    def test_put_round_trip(self, client):
        table = client.get("/api/weights").json()
        table["Cruise"]["SL"] = 175
        response = client.put("/api/weights", json=table)
        assert response.status_code == 200
        assert response.json()["Cruise"]["SL"] == 175
        assert client.get("/api/weights").json()["Cruise"]["SL"] == 175

    def test_put_persists_to_disk(self, client, state_dir):
        table = client.get("/api/weights").json()
        table["AWS"]["PI"] = 120
        client.put("/api/weights", json=table)
        stored = json.loads((state_dir / "weights.json").read_text())
        assert stored["AWS"]["PI"] == 120

    def test_rejected_put_changes_nothing(self, client):
        before = client.get("/api/weights").json()
        bad = json.loads(json.dumps(before))
        bad["Cruise"]["SL"] = -3
        response = client.put("/api/weights", json=bad)
        assert response.status_code == 422
        assert any("Cruise.SL" in message for message in response.json()["errors"])
        assert client.get("/api/weights").json() == before


class TestRouteAndRuns:
    def test_route_document(self, client):
        doc = client.get("/api/routes/short_line").json()
        assert doc["length_m"] == 1500.0
        assert doc["id"] == "short_line"
        assert len(doc["features"]) == 4

    def test_unknown_route_404(self, client):
        assert client.get("/api/routes/elsewhere").status_code == 404

    def test_run_listing(self, client):
        runs = client.get("/api/runs").json()["runs"]
        assert [r["id"] for r in runs] == ["run_001", "run_002", "run_003", "run_004"]

    def test_timeline_fields_and_length(self, client):
        body = client.get("/api/runs/run_001/timeline").json()
        assert body["rows"] > 0
        n = len(body["t"])
        assert n <= 5000
        for key in ("S", "SL", "SLS", "state", "power", "brake"):
            assert len(body[key]) == n
        assert body["stride"] >= 1
        assert set(body["state"]) <= {
            "Cruise", "AWS", "Engine_Check", "Brake_Change", "Speed_Change"
        }

    def test_unknown_run_404(self, client):
        assert client.get("/api/runs/run_999/timeline").status_code == 404


class TestEvaluationJobs:
    def test_evaluate_job_completes_with_all_states(self, client):
        job_id = client.post("/api/evaluate", json={}).json()["job_id"]
        record = wait_for_job(client, job_id)
        assert record["status"] == "done"
        report = client.get("/api/reports/latest").json()
        assert set(report["variants"]) == {"nb", "owo", "owo_pi"}
        assert set(report["states"]) == {
            "Cruise", "AWS", "Engine_Check", "Brake_Change", "Speed_Change"
        }

    def test_identical_parameters_reuse_job(self, client):
        first = client.post("/api/evaluate", json={}).json()["job_id"]
        wait_for_job(client, first)
        second = client.post("/api/evaluate", json={}).json()["job_id"]
        assert second == first

    def test_weight_change_triggers_new_job(self, client):
        first = client.post("/api/evaluate", json={}).json()["job_id"]
        wait_for_job(client, first)
        table = client.get("/api/weights").json()
        table["Cruise"]["SL"] = 160
        client.put("/api/weights", json=table)
        second = client.post("/api/evaluate", json={}).json()["job_id"]
        assert second != first
        record = wait_for_job(client, second)
        assert record["status"] == "done"
        report = client.get("/api/reports/latest").json()
        assert report["metadata"]["weight_hash"] != ""

    def test_unknown_variant_rejected(self, client):
        response = client.post("/api/evaluate", json={"variants": ["bayes"]})
        assert response.status_code == 422

    def test_unknown_job_404(self, client):
        assert client.get("/api/jobs/nope").status_code == 404

    def test_no_report_yet_404(self, client, state_dir):
        latest = state_dir / "reports" / "latest.json"
        if latest.exists():
            latest.unlink()
        assert client.get("/api/reports/latest").status_code == 404


class TestCliServiceParity:
    def test_service_report_equals_cli_report(self, client, state_dir, tmp_path):
        """Same weights, same model, same split: byte-equal report JSON."""
        job_id = client.post("/api/evaluate", json={}).json()["job_id"]
        wait_for_job(client, job_id)
        weight_hash = client.get("/api/reports/latest").json()["metadata"]["weight_hash"]
        service_report = (state_dir / "reports" / f"{weight_hash}.json").read_text()

        cli_report_path = tmp_path / "cli_report.json"
        assert main([
            "eval", "--model", str(state_dir / "model.json"),
            "--manifest", str(state_dir / MANIFEST_NAME),
            "--out", str(cli_report_path),
        ]) in (0, 1)
        assert cli_report_path.read_text() == service_report
