"""HTTP/JSON workbench service backing the browser UI.

Endpoints (all under /v1): resources listing, asynchronous run submission
and retrieval, per-run KPIs, the what-if decision preview, and battery
summaries persisted by the CLI. Results are immutable once published.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field, field_validator

from .catalog import (CognitiveProfile, DOMAINS, Subtask, load_default_catalog,
                      load_default_scenarios)
from .config import SimConfig
from .engine import RunConfig, run, whatif_preview
from .errors import HaasError
from .humanstate import HumanState
from .learners import ALL_STRATEGIES
from .outcomes import REWARD_PROFILES
from .policy import LEVELS


class RunRequest(BaseModel):
    domain: str
    scenario: str
    strategy: str = "linucb"
    policies: bool = True
    governance_level: str | None = None
    seed: int = Field(default=11, ge=0)
    cycles: int | None = Field(default=None, ge=1)
    reward_profile: str = "four_outcome"
    no_policy: bool = False
    no_fatigue: bool = False
    no_trust: bool = False
    no_deskilling: bool = False

    @field_validator("domain")
    @classmethod
    def _domain_known(cls, v: str) -> str:
        if v not in DOMAINS:
            raise ValueError(f"unknown domain {v!r}")
        return v

    @field_validator("strategy")
    @classmethod
    def _strategy_known(cls, v: str) -> str:
        if v not in ALL_STRATEGIES:
            raise ValueError(f"unknown strategy {v!r}")
        return v

    @field_validator("governance_level")
    @classmethod
    def _level_known(cls, v: str | None) -> str | None:
        if v is not None and v not in LEVELS:
            raise ValueError(f"unknown governance level {v!r}; expected one of {LEVELS}")
        return v

    @field_validator("reward_profile")
    @classmethod
    def _profile_known(cls, v: str) -> str:
        if v not in REWARD_PROFILES:
            raise ValueError(f"unknown reward profile {v!r}")
        return v


class InlineProfile(BaseModel):
    r: float = Field(ge=0, le=1)
    tau: float = Field(ge=0, le=1)
    c: float = Field(ge=0, le=1)
    a: float = Field(ge=0, le=1)
    h: float = Field(ge=0, le=1)


class InlineSubtask(BaseModel):
    domain: str
    task_type: str
    name: str = "inline subtask"
    profile: InlineProfile
    baseline_duration: float = Field(default=4.0, gt=0)
    criticality: float = Field(default=0.5, ge=0, le=1)
    constraint: str = "none"


class WhatIfRequest(BaseModel):
    subtask_id: str | None = None
    subtask: InlineSubtask | None = None
    level: str = "L0"
    fatigue: float = Field(default=0.0, ge=0, le=1)
    trust: float = Field(default=0.8, ge=0, le=1)
    skill: float = Field(default=0.5, ge=0, le=1)

    @field_validator("level")
    @classmethod
    def _level_known(cls, v: str) -> str:
        if v not in LEVELS:
            raise ValueError(f"unknown governance level {v!r}")
        return v


class _RunStore:
    """Thread-safe run registry with atomic on-disk publication."""

    def __init__(self, data_dir: Path | None):
        self._lock = threading.Lock()
        self._handles: dict[str, dict] = {}
        self._results: dict[str, dict] = {}
        self._data_dir = data_dir
        if data_dir:
            data_dir.mkdir(parents=True, exist_ok=True)

    def create(self, config: RunConfig) -> dict:
        handle = {
            "id": uuid.uuid4().hex,
            "status": "queued",
            "config": config.to_dict(),
            "submitted_at": time.time(),
            "finished_at": None,
            "error": None,
        }
        with self._lock:
            self._handles[handle["id"]] = handle
        return handle

    def set_status(self, run_id: str, status: str, error: str | None = None) -> None:
        with self._lock:
            handle = self._handles[run_id]
            handle["status"] = status
            handle["error"] = error
            if status in ("done", "failed"):
                handle["finished_at"] = time.time()

    def publish(self, run_id: str, result_dict: dict) -> None:
        with self._lock:
            self._results[run_id] = result_dict
        if self._data_dir:
            path = self._data_dir / f"run-{run_id}.json"
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(result_dict, sort_keys=True), encoding="utf-8")
            tmp.rename(path)

    def handle(self, run_id: str) -> dict | None:
        with self._lock:
            return dict(self._handles[run_id]) if run_id in self._handles else None

    def result(self, run_id: str) -> dict | None:
        with self._lock:
            return self._results.get(run_id)

    def all_handles(self) -> list[dict]:
        with self._lock:
            return sorted((dict(h) for h in self._handles.values()),
                          key=lambda h: h["submitted_at"])


def _find_subtask(subtask_id: str) -> Subtask | None:
    for domain in DOMAINS:
        for sub in load_default_catalog(domain):
            if sub.id == subtask_id:
                return sub
    return None


def create_app(data_dir: str | Path | None = None, workers: int = 2,
               sim_cfg: SimConfig | None = None) -> FastAPI:
    app = FastAPI(title="haas workbench", version="1.0")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    store = _RunStore(Path(data_dir) if data_dir else None)
    pool = ThreadPoolExecutor(max_workers=max(1, workers))
    cfg = sim_cfg or SimConfig()
    app.state.store = store
    app.state.pool = pool

    def _execute(run_id: str, config: RunConfig) -> None:
        store.set_status(run_id, "running")
        try:
            result = run(config, cfg)
            store.publish(run_id, result.to_dict())
            store.set_status(run_id, "done")
        except Exception as exc:  # failed runs surface their message
            store.set_status(run_id, "failed", error=str(exc))

    @app.get("/v1/resources")
    def resources() -> dict:
        scenarios = [{
            "domain": s.domain, "key": s.key, "name": s.name,
            "cycles": s.cycles, "subtasks_per_cycle": s.subtasks_per_cycle,
        } for s in load_default_scenarios()]
        subtasks = [{
            "id": s.id, "name": s.name, "domain": s.domain,
            "task_type": s.task_type, "constraint": s.constraint,
        } for domain in DOMAINS for s in load_default_catalog(domain)]
        return {
            "scenarios": scenarios,
            "strategies": list(ALL_STRATEGIES),
            "levels": list(LEVELS),
            "reward_profiles": sorted(REWARD_PROFILES),
            "subtasks": subtasks,
        }

    @app.post("/v1/runs", status_code=202)
    def submit_run(request: RunRequest) -> dict:
        try:
            config = RunConfig(**request.model_dump())
        except HaasError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        handle = store.create(config)
        pool.submit(_execute, handle["id"], config)
        return {"id": handle["id"], "status": handle["status"],
                "config": handle["config"]}

    @app.get("/v1/runs")
    def list_runs() -> dict:
        return {"runs": store.all_handles()}

    @app.get("/v1/runs/{run_id}")
    def get_run(run_id: str) -> dict:
        handle = store.handle(run_id)
        if handle is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
        payload = {"handle": handle}
        result = store.result(run_id)
        if handle["status"] == "done" and result is not None:
            payload["result"] = result
        return payload

    @app.get("/v1/runs/{run_id}/kpis")
    def get_run_kpis(run_id: str) -> dict:
        handle = store.handle(run_id)
        if handle is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
        result = store.result(run_id)
        if handle["status"] != "done" or result is None:
            return {"handle": handle}
        return {"handle": handle, "per_sprint": result["per_sprint"],
                "aggregate": result["aggregate"], "screens": result["screens"],
                "mode_history": [
                    {"index": r["index"], "cycle": r["cycle"], "mode": r["mode"],
                     "sigma_h": r["sigma_h"], "task_type": r["task_type"],
                     "fired_rule_id": r["fired_rule_id"], "reward": r["reward"]}
                    for r in result["records"]]}

    @app.post("/v1/whatif")
    def whatif(request: WhatIfRequest) -> dict:
        if request.subtask is not None:
            data = request.subtask
            try:
                subtask = Subtask(
                    id="inline", name=data.name, task_type=data.task_type,
                    domain=data.domain,
                    profile=CognitiveProfile(data.profile.r, data.profile.tau,
                                             data.profile.c, data.profile.a,
                                             data.profile.h),
                    baseline_duration=data.baseline_duration,
                    criticality=data.criticality, constraint=data.constraint)
            except HaasError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
        elif request.subtask_id:
            subtask = _find_subtask(request.subtask_id)
            if subtask is None:
                raise HTTPException(status_code=404,
                                    detail=f"unknown subtask {request.subtask_id!r}")
        else:
            raise HTTPException(status_code=422,
                                detail="provide subtask_id or an inline subtask")
        state = HumanState(fatigue=request.fatigue, trust=request.trust,
                           skill=request.skill)
        return whatif_preview(subtask, state, request.level, sim_cfg=cfg)

    @app.get("/v1/batteries/{battery_id}")
    def get_battery(battery_id: str) -> dict:
        if store._data_dir is None:
            raise HTTPException(status_code=404, detail="no data directory configured")
        base = store._data_dir / battery_id
        summary = base / "summary.json"
        if not summary.exists():
            raise HTTPException(status_code=404, detail=f"unknown battery {battery_id!r}")
        payload = json.loads(summary.read_text(encoding="utf-8"))
        index_path = base / "battery.json"
        index = json.loads(index_path.read_text(encoding="utf-8")) if index_path.exists() else {}
        return {"id": battery_id, "summary": payload, "index": index}

    static_dir = Path(__file__).parent / "static"
    if static_dir.exists():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
