from __future__ import annotations

import time

import pytest
from fastapi.testclient import TestClient

from haas.api import create_app
from haas.engine import RunConfig, run


@pytest.fixture()
def client(tmp_path):
    app = create_app(data_dir=tmp_path / "data", workers=2)
    with TestClient(app) as c:
        yield c


def wait_done(client, run_id, timeout=30.0) -> dict:
    deadline = time.time() + timeout
    while time.time() < deadline:
        payload = client.get(f"/v1/runs/{run_id}").json()
        if payload["handle"]["status"] in ("done", "failed"):
            return payload
        time.sleep(0.02)
    raise TimeoutError("run did not finish")


VALID = {"domain": "manufacturing", "scenario": "standard_production",
         "strategy": "linucb", "policies": True, "seed": 11}


class TestResources:
    def test_default_install_counts(self, client):
        payload = client.get("/v1/resources").json()
        assert len(payload["scenarios"]) == 8
        assert len(payload["strategies"]) == 10
        assert len(payload["levels"]) == 5
        assert len(payload["reward_profiles"]) == 3
        assert len(payload["subtasks"]) == 50


class TestRuns:
    def test_submit_and_fetch(self, client):
        response = client.post("/v1/runs", json=VALID)
        assert response.status_code == 202
        handle = response.json()
        assert handle["status"] in ("queued", "running")
        payload = wait_done(client, handle["id"])
        assert payload["handle"]["status"] == "done"
        assert len(payload["result"]["records"]) == 32

    def test_same_config_twice_identical_results(self, client):
        ids = [client.post("/v1/runs", json=VALID).json()["id"] for _ in range(2)]
        results = [wait_done(client, i)["result"] for i in ids]
        assert results[0] == results[1]

    def test_invalid_level_names_field(self, client):
        bad = dict(VALID, governance_level="L5")
        response = client.post("/v1/runs", json=bad)
        assert response.status_code == 422
        detail = response.json()["detail"]
        assert "governance_level" in str(detail)

    def test_unknown_run_is_404(self, client):
        assert client.get("/v1/runs/deadbeef").status_code == 404

    def test_kpis_view(self, client):
        handle = client.post("/v1/runs", json=VALID).json()
        wait_done(client, handle["id"])
        payload = client.get(f"/v1/runs/{handle['id']}/kpis").json()
        assert "aggregate" in payload and "per_sprint" in payload
        assert len(payload["mode_history"]) == 32

    def test_api_matches_cli_engine(self, client):
        handle = client.post("/v1/runs", json=VALID).json()
        payload = wait_done(client, handle["id"])
        direct = run(RunConfig(**{k: VALID[k] for k in
                                  ("domain", "scenario", "strategy", "policies",
                                   "seed")}))
        assert payload["result"] == direct.to_dict()


class TestWhatIf:
    def test_quality_inspection_levels(self, client):
        at_l0 = client.post("/v1/whatif", json={
            "subtask_id": "mf-qi-01", "level": "L0"}).json()
        assert len(at_l0["feasible_modes"]) == 5
        at_l3 = client.post("/v1/whatif", json={
            "subtask_id": "mf-qi-01", "level": "L3"}).json()
        assert at_l3["feasible_modes"] == ["Supervised"]
        assert at_l3["directive"]["fired_rule_id"] == "mfg_high_impact_sup"

    def test_inline_profile_critical_fatigue(self, client):
        body = {
            "subtask": {"domain": "software", "task_type": "Code Generation",
                        "profile": {"r": 0.5, "tau": 0.5, "c": 0.5, "a": 0.5,
                                    "h": 0.5}},
            "level": "L2", "fatigue": 0.95,
        }
        payload = client.post("/v1/whatif", json=body).json()
        assert payload["directive"]["fired_rule_id"] == "critical_fatigue_autonomous"
        assert payload["feasible_modes"] == ["Autonomous"]

    def test_copilot_share_worked_example(self, client):
        body = {
            "subtask": {"domain": "software", "task_type": "Code Generation",
                        "profile": {"r": 0.5, "tau": 0.55, "c": 0.5, "a": 0.55,
                                    "h": 0.5}},
            "level": "L0", "fatigue": 0.80,
        }
        payload = client.post("/v1/whatif", json=body).json()
        copilot = next(m for m in payload["modes"] if m["mode"] == "Copilot")
        assert copilot["sigma_ai"] == pytest.approx(0.38)

    def test_unknown_subtask_404(self, client):
        response = client.post("/v1/whatif", json={"subtask_id": "nope", "level": "L0"})
        assert response.status_code == 404

    def test_whatif_does_not_mutate_service_state(self, client):
        before = client.get("/v1/runs").json()
        client.post("/v1/whatif", json={"subtask_id": "mf-qi-01", "level": "L3"})
        after = client.get("/v1/runs").json()
        assert before == after


class TestBatteries:
    def test_missing_battery_404(self, client):
        assert client.get("/v1/batteries/nothing").status_code == 404

    def test_battery_readable_after_cli_export(self, client, tmp_path):
        from haas.bench import BatterySpec, run_battery
        app_dir = client.app.state.store._data_dir
        spec = BatterySpec(program="ladder", seeds=(11,), domains=("software",),
                           levels=("L0",), out=str(app_dir / "lad"))
        run_battery(spec)
        payload = client.get("/v1/batteries/lad")
        assert payload.status_code == 200
        assert payload.json()["summary"]["program"] == "ladder"
