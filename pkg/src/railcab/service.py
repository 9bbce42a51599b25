"""HTTP service for the human-in-the-loop tuning cycle.

The web UI talks to this and nothing else: read/replace the weight table,
kick off evaluation jobs against the fixed fitted model, poll job status,
and pull run timelines for charting. Jobs run one at a time in FIFO order;
only the weight table varies between them.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import queue
import tempfile
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from . import classifier, evaluate
from .dataset import BASE_FEATURE_COUNT, MANIFEST_NAME, RUN_HEADER, load_dataset
from .evaluate import SPLIT_SEED, SPLIT_TRAIN_RUNS
from .route import load_route, route_to_document
from .weights import WeightTable, WeightTableError

TIMELINE_MAX_POINTS = 5000
REPORTS_DIR = "reports"
WEIGHTS_FILE = "weights.json"


@dataclass
class JobRecord:
    job_id: str
    kind: str
    params_hash: str
    status: str = "queued"          # queued | running | done | failed
    result_path: str | None = None
    error: str | None = None
    weight_mapping: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "params_hash": self.params_hash,
            "status": self.status,
            "result_path": self.result_path,
            "error": self.error,
        }


class TuningHost:
    """Owns the mutable service state: weight table, dataset cache, jobs."""

    def __init__(self, state_dir: Path):
        self.state_dir = Path(state_dir)
        if not (self.state_dir / MANIFEST_NAME).exists():
            raise FileNotFoundError(f"{self.state_dir} has no {MANIFEST_NAME}")
        self.model, bundled_weights = classifier.load_model(self.state_dir / "model.json")
        weights_path = self.state_dir / WEIGHTS_FILE
        if weights_path.exists():
            self.weights = WeightTable(json.loads(weights_path.read_text()))
        else:
            self.weights = bundled_weights
            self._persist_weights()
        (self.state_dir / REPORTS_DIR).mkdir(exist_ok=True)

        self._lock = threading.Lock()
        self._dataset = None
        self._jobs: dict[str, JobRecord] = {}
        self._by_params: dict[str, str] = {}
        self._queue: queue.Queue[JobRecord | None] = queue.Queue()
        self._worker: threading.Thread | None = None

    # -- weights ---------------------------------------------------------

    def get_weights(self) -> dict:
        with self._lock:
            return self.weights.to_mapping()

    def set_weights(self, mapping: dict) -> dict:
        table = WeightTable(mapping)  # raises WeightTableError with field messages
        with self._lock:
            self.weights = table
            self._persist_weights()
            return self.weights.to_mapping()

    def _persist_weights(self) -> None:
        # Temp-file-plus-rename keeps a rejected or interrupted write from
        # clobbering the stored table.
        target = self.state_dir / WEIGHTS_FILE
        fd, tmp = tempfile.mkstemp(dir=self.state_dir, suffix=".weights")
        with os.fdopen(fd, "w") as fh:
            fh.write(json.dumps(self.weights.to_mapping(), indent=2, sort_keys=True) + "\n")
        os.replace(tmp, target)

    # -- dataset ---------------------------------------------------------

    def dataset(self):
        with self._lock:
            if self._dataset is None:
                self._dataset = load_dataset(self.state_dir / MANIFEST_NAME)
            return self._dataset

    # -- jobs ------------------------------------------------------------

    def enqueue_evaluate(self, variants: tuple[str, ...]) -> JobRecord:
        with self._lock:
            weight_mapping = self.weights.to_mapping()
        params = {
            "weights": weight_mapping,
            "variants": list(variants),
            "manifest_hash": hashlib.sha256(
                (self.state_dir / MANIFEST_NAME).read_bytes()
            ).hexdigest(),
        }
        params_hash = hashlib.sha256(
            json.dumps(params, sort_keys=True).encode()
        ).hexdigest()
        with self._lock:
            existing_id = self._by_params.get(params_hash)
            if existing_id is not None:
                existing = self._jobs[existing_id]
                if existing.status in ("queued", "running", "done"):
                    return existing
            job = JobRecord(
                job_id=uuid.uuid4().hex[:12],
                kind="evaluate",
                params_hash=params_hash,
                weight_mapping=weight_mapping,
            )
            job.variants = variants  # type: ignore[attr-defined]
            self._jobs[job.job_id] = job
            self._by_params[params_hash] = job.job_id
        self._queue.put(job)
        return job

    def get_job(self, job_id: str) -> JobRecord | None:
        with self._lock:
            return self._jobs.get(job_id)

    def _run_evaluate(self, job: JobRecord) -> None:
        data = self.dataset()
        table = WeightTable(job.weight_mapping)
        split = self.model.split
        if split is None:
            run_ids = list(range(len(data.manifest["runs"])))
            train_runs, test_runs = evaluate.split_runs(
                run_ids, SPLIT_TRAIN_RUNS, SPLIT_SEED
            )
            split = {
                "train_runs": train_runs,
                "test_runs": test_runs,
                "train_count": SPLIT_TRAIN_RUNS,
                "seed": SPLIT_SEED,
            }
        test_mask = np.isin(data.run_ids, split["test_runs"])
        X = data.X[test_mask]
        if not self.model.has_pi_features():
            X = X[:, :BASE_FEATURE_COUNT]
        metadata = {
            "route_hash": data.manifest["route_hash"],
            "seeds": [entry["seed"] for entry in data.manifest["runs"]],
            "weight_hash": table.hash(),
            "split": split,
            "dt": data.manifest["dt"],
        }
        report = evaluate.evaluate(
            self.model,
            X,
            data.y[test_mask],
            data.states[test_mask],
            table,
            variants=getattr(job, "variants", classifier.VARIANTS),
            metadata=metadata,
        )
        report_path = self.state_dir / REPORTS_DIR / f"{table.hash()}.json"
        evaluate.save_report(report, report_path)
        evaluate.save_report(report, self.state_dir / REPORTS_DIR / "latest.json")
        job.result_path = str(report_path)

    def _worker_loop(self) -> None:
        while True:
            job = self._queue.get()
            if job is None:
                return
            job.status = "running"
            try:
                self._run_evaluate(job)
                job.status = "done"
            except Exception as exc:  # surfaced through the job record
                job.status = "failed"
                job.error = f"{type(exc).__name__}: {exc}"

    def start(self) -> None:
        if self._worker is None:
            self._worker = threading.Thread(target=self._worker_loop, daemon=True)
            self._worker.start()

    def stop(self) -> None:
        if self._worker is not None:
            self._queue.put(None)
            self._worker.join(timeout=10)
            self._worker = None


def _downsample(values: list, stride: int) -> list:
    return values[::stride]


def create_app(state_dir: str | Path, ui_dir: Path | None = None) -> FastAPI:
    host = TuningHost(Path(state_dir))

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        host.start()
        yield
        host.stop()

    app = FastAPI(title="railcab tuning service", lifespan=lifespan)
    app.state.host = host

    @app.get("/api/weights")
    def get_weights():
        return host.get_weights()

    @app.put("/api/weights")
    def put_weights(mapping: dict):
        try:
            return host.set_weights(mapping)
        except WeightTableError as exc:
            return JSONResponse(status_code=422, content={"errors": exc.errors})

    @app.get("/api/routes/{route_id}")
    def get_route(route_id: str):
        manifest = json.loads((host.state_dir / MANIFEST_NAME).read_text())
        route_file = host.state_dir / manifest["route_file"]
        route = load_route(route_file)
        known = {Path(manifest["route_file"]).stem, "default"}
        if route_id not in known:
            raise HTTPException(status_code=404, detail=f"unknown route {route_id!r}")
        doc = route_to_document(route)
        doc["id"] = Path(manifest["route_file"]).stem
        doc["hash"] = manifest["route_hash"]
        return doc

    @app.get("/api/runs/{run_id}/timeline")
    def get_timeline(run_id: str):
        manifest = json.loads((host.state_dir / MANIFEST_NAME).read_text())
        entry = next(
            (e for e in manifest["runs"] if Path(e["file"]).stem == run_id), None
        )
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
        frame = pd.read_csv(host.state_dir / entry["file"])
        expected = RUN_HEADER.split(",")
        if list(frame.columns) != expected:
            raise HTTPException(status_code=500, detail="run file has unexpected columns")
        stride = max(1, math.ceil(len(frame) / TIMELINE_MAX_POINTS))
        return {
            "run_id": run_id,
            "seed": entry["seed"],
            "rows": int(len(frame)),
            "stride": stride,
            "t": _downsample(frame["t_s"].tolist(), stride),
            "S": _downsample(frame["S"].tolist(), stride),
            "SL": _downsample(frame["SL"].tolist(), stride),
            "SLS": _downsample(frame["SLS"].tolist(), stride),
            "state": _downsample(frame["state"].tolist(), stride),
            "power": _downsample(frame["power"].tolist(), stride),
            "brake": _downsample(frame["brake"].tolist(), stride),
        }

    @app.get("/api/runs")
    def list_runs():
        manifest = json.loads((host.state_dir / MANIFEST_NAME).read_text())
        return {
            "runs": [
                {"id": Path(e["file"]).stem, "seed": e["seed"], "rows": e["rows"]}
                for e in manifest["runs"]
            ]
        }

    @app.post("/api/evaluate")
    def post_evaluate(body: dict | None = None):
        requested = tuple((body or {}).get("variants", classifier.VARIANTS))
        for variant in requested:
            if variant not in classifier.VARIANTS:
                raise HTTPException(status_code=422, detail=f"unknown variant {variant!r}")
        job = host.enqueue_evaluate(requested)
        return {"job_id": job.job_id, "status": job.status}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        job = host.get_job(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return job.to_dict()

    @app.get("/api/reports/latest")
    def latest_report():
        path = host.state_dir / REPORTS_DIR / "latest.json"
        if not path.exists():
            raise HTTPException(status_code=404, detail="no report yet")
        return json.loads(path.read_text())

    if ui_dir is not None and Path(ui_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
