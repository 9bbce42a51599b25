"""Run-file and manifest I/O.

A run file is one CSV per journey, one row per step; a manifest ties the
run files to the route, the seeds, and dt so a dataset is self-describing.
Bulk loading returns flat numpy arrays ready for fitting and evaluation.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from .dynamics import COMMANDS
from .odm import OperationalState
from .route import RouteSpec, route_hash, save_route
from .simulate import ObservationVector, TraceStep

RUN_HEADER = "t_s,pos_m,S,SL,SLS,RoA,ES,state,power,brake,prev_power,prev_brake"

FEATURE_NAMES = ("T", "S", "SL", "SLS", "RoA", "ES", "prev_power", "prev_brake")
BASE_FEATURE_COUNT = 6

STATE_ORDER = tuple(OperationalState)
_STATE_CODE = {s.value: i for i, s in enumerate(STATE_ORDER)}

MANIFEST_NAME = "manifest.json"
ROUTE_FILE_NAME = "route.json"


def class_index(power: int, brake: int) -> int:
    """Canonical class index: (0,0),(1,0)..(4,0),(0,1)..(0,4)."""
    if power > 0 and brake > 0:
        raise ValueError("counteracting input has no class")
    return power if brake == 0 else 4 + brake


CLASS_ORDER = tuple(
    COMMANDS[(p, b)]
    for p, b in ((0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (0, 1), (0, 2), (0, 3), (0, 4))
)
N_CLASSES = len(CLASS_ORDER)


def write_run_csv(steps: Sequence[TraceStep], path: str | Path) -> int:
    path = Path(path)
    try:
        with path.open("w") as fh:
            fh.write(RUN_HEADER + "\n")
            for s in steps:
                o = s.obs
                fh.write(
                    f"{s.t_s:.6f},{s.pos_m:.6f},{o.S:.6f},{o.SL:.6f},{o.SLS:.6f},"
                    f"{o.RoA:.6f},{o.ES},{s.state.value},{s.input.power_notch},"
                    f"{s.input.brake_notch},{s.prev_input.power_notch},"
                    f"{s.prev_input.brake_notch}\n"
                )
    except OSError as exc:
        raise OSError(f"failed writing run file {path}: {exc}") from exc
    return len(steps)


def read_run_csv(path: str | Path) -> list[TraceStep]:
    """Exact re-import of a run file (values at file precision)."""
    path = Path(path)
    steps: list[TraceStep] = []
    with path.open() as fh:
        header = fh.readline().strip()
        if header != RUN_HEADER:
            raise ValueError(f"{path}: unexpected run-file header {header!r}")
        for line in fh:
            (
                t_s, pos_m, s_val, sl, sls, roa, es, state_name,
                power, brake, prev_power, prev_brake,
            ) = line.rstrip("\n").split(",")
            steps.append(
                TraceStep(
                    t_s=float(t_s),
                    pos_m=float(pos_m),
                    obs=ObservationVector(
                        T=float(t_s), S=float(s_val), SL=float(sl),
                        SLS=float(sls), RoA=float(roa), ES=int(es),
                    ),
                    state=OperationalState(state_name),
                    input=COMMANDS[(int(power), int(brake))],
                    prev_input=COMMANDS[(int(prev_power), int(prev_brake))],
                )
            )
    return steps


def export_dataset(
    runs: Sequence[Sequence[TraceStep]],
    out_dir: str | Path,
    route: RouteSpec,
    seeds: Sequence[int],
    dt: float,
    route_name: str | None = None,
) -> int:
    """Write run files plus a manifest; returns the total row count."""
    if not runs:
        raise ValueError("export_dataset needs at least one run")
    if len(runs) != len(seeds):
        raise ValueError("one seed per run required")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    route_file = f"{route_name}.json" if route_name else ROUTE_FILE_NAME
    save_route(route, out_dir / route_file)

    entries = []
    total = 0
    for i, (steps, seed) in enumerate(zip(runs, seeds), start=1):
        name = f"run_{i:03d}.csv"
        rows = write_run_csv(steps, out_dir / name)
        entries.append({"file": name, "seed": seed, "rows": rows})
        total += rows
    manifest = {
        "dt": dt,
        "route_file": route_file,
        "route_hash": route_hash(route),
        "runs": entries,
        "total_rows": total,
    }
    (out_dir / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n")
    return total


def read_manifest(manifest_path: str | Path) -> dict:
    manifest_path = Path(manifest_path)
    manifest = json.loads(manifest_path.read_text())
    for key in ("dt", "route_file", "route_hash", "runs", "total_rows"):
        if key not in manifest:
            raise ValueError(f"{manifest_path}: manifest missing {key!r}")
    return manifest


def manifest_hash(manifest: dict) -> str:
    return hashlib.sha256(
        json.dumps(manifest, sort_keys=True).encode()
    ).hexdigest()


def trace_arrays(
    runs: Sequence[Sequence[TraceStep]],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Flatten in-memory runs to (X, y, states, run_ids) arrays."""
    state_code = {s: i for i, s in enumerate(STATE_ORDER)}
    rows, labels, states, run_ids = [], [], [], []
    for run_id, run in enumerate(runs):
        for step in run:
            o = step.obs
            rows.append(
                (o.T, o.S, o.SL, o.SLS, o.RoA, float(o.ES),
                 float(step.prev_input.power_notch), float(step.prev_input.brake_notch))
            )
            labels.append(class_index(step.input.power_notch, step.input.brake_notch))
            states.append(state_code[step.state])
            run_ids.append(run_id)
    return (
        np.asarray(rows, dtype=np.float64),
        np.asarray(labels, dtype=np.int64),
        np.asarray(states, dtype=np.int64),
        np.asarray(run_ids, dtype=np.int64),
    )


@dataclass
class Dataset:
    """Flat view of every run: one row per step across the whole manifest."""

    X: np.ndarray          # [N, 8] float64, FEATURE_NAMES order
    y: np.ndarray          # [N] int64 canonical class indices
    states: np.ndarray     # [N] int64 codes into STATE_ORDER
    run_ids: np.ndarray    # [N] int64 index into manifest["runs"]
    feature_names: tuple[str, ...]
    manifest: dict

    def __len__(self) -> int:
        return len(self.y)


def load_dataset(manifest_path: str | Path) -> Dataset:
    manifest_path = Path(manifest_path)
    manifest = read_manifest(manifest_path)
    base = manifest_path.parent
    frames = []
    for run_id, entry in enumerate(manifest["runs"]):
        frame = pd.read_csv(base / entry["file"])
        frame["run_id"] = run_id
        frames.append(frame)
    table = pd.concat(frames, ignore_index=True)

    X = np.column_stack(
        [
            table["t_s"].to_numpy(np.float64),
            table["S"].to_numpy(np.float64),
            table["SL"].to_numpy(np.float64),
            table["SLS"].to_numpy(np.float64),
            table["RoA"].to_numpy(np.float64),
            table["ES"].to_numpy(np.float64),
            table["prev_power"].to_numpy(np.float64),
            table["prev_brake"].to_numpy(np.float64),
        ]
    )
    power = table["power"].to_numpy(np.int64)
    brake = table["brake"].to_numpy(np.int64)
    y = np.where(brake == 0, power, 4 + brake)
    states = table["state"].map(_STATE_CODE).to_numpy(np.int64)
    run_ids = table["run_id"].to_numpy(np.int64)
    return Dataset(X, y, states, run_ids, FEATURE_NAMES, manifest)
