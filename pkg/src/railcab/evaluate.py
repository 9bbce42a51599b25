"""Evaluation harness: per-state accuracy of the three prediction variants,
confusion matrices, and the qualitative comparison the pipeline gates on.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .classifier import (
    VARIANT_NB,
    VARIANT_OWO,
    VARIANT_OWO_PI,
    VARIANTS,
    GaussianNbModel,
    predict_indices,
)
from .dataset import CLASS_ORDER, N_CLASSES, STATE_ORDER
from .weights import WeightTable

SPLIT_TRAIN_RUNS = 20
SPLIT_SEED = 7

AWS_FLOOR = 0.98
CRUISE_GAIN = 0.05
OVERALL_GAIN = 0.03


def split_runs(
    run_ids: Sequence[int], train_count: int, seed: int
) -> tuple[list[int], list[int]]:
    """Assign whole runs to train or test; no run contributes to both."""
    ids = list(run_ids)
    if train_count >= len(ids):
        raise ValueError(f"train_count {train_count} must be below {len(ids)} runs")
    if train_count < 1:
        raise ValueError("train_count must be at least 1")
    order = list(ids)
    random.Random(seed).shuffle(order)
    return sorted(order[:train_count]), sorted(order[train_count:])


@dataclass
class EvalReport:
    variants: tuple[str, ...]
    states: dict                 # state name -> {"support": n, "accuracy": {variant: x}}
    overall: dict                # variant -> accuracy
    total_rows: int
    confusion: dict              # variant -> 9x9 list (rows true, cols predicted)
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "variants": list(self.variants),
            "states": self.states,
            "overall": self.overall,
            "total_rows": self.total_rows,
            "confusion": self.confusion,
            "class_order": [[c.power_notch, c.brake_notch] for c in CLASS_ORDER],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EvalReport":
        return cls(
            variants=tuple(doc["variants"]),
            states=doc["states"],
            overall=doc["overall"],
            total_rows=doc["total_rows"],
            confusion=doc["confusion"],
            metadata=doc.get("metadata", {}),
        )


def evaluate(
    model: GaussianNbModel,
    X: np.ndarray,
    y: np.ndarray,
    states: np.ndarray,
    weights: WeightTable,
    variants: Sequence[str] = VARIANTS,
    metadata: dict | None = None,
) -> EvalReport:
    """Score each requested variant on the test rows, per state and overall."""
    if len(y) == 0:
        raise ValueError("empty test set")
    if not (len(y) == len(states) == X.shape[0]):
        raise ValueError("row/state length mismatch")
    for variant in variants:
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")

    y = np.asarray(y, dtype=np.int64)
    states = np.asarray(states, dtype=np.int64)
    predictions = {
        variant: predict_indices(model, X, states, weights, variant)
        for variant in variants
    }

    state_rows: dict[str, dict] = {}
    for code, state in enumerate(STATE_ORDER):
        mask = states == code
        support = int(mask.sum())
        if support == 0:
            continue  # state absent from the test rows
        accuracy = {
            variant: float((predictions[variant][mask] == y[mask]).mean())
            for variant in variants
        }
        state_rows[state.value] = {"support": support, "accuracy": accuracy}

    overall = {
        variant: float((predictions[variant] == y).mean()) for variant in variants
    }
    confusion = {}
    for variant in variants:
        matrix = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
        np.add.at(matrix, (y, predictions[variant]), 1)
        confusion[variant] = matrix.tolist()

    return EvalReport(
        variants=tuple(variants),
        states=state_rows,
        overall=overall,
        total_rows=int(len(y)),
        confusion=confusion,
        metadata=metadata or {},
    )


@dataclass
class Claim:
    name: str
    passed: bool
    detail: str


@dataclass
class Comparison:
    claims: list[Claim]
    deltas: dict     # state -> {"owo": owo-nb, "owo_pi": owo_pi-nb}
    all_passed: bool

    def to_dict(self) -> dict:
        return {
            "claims": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.claims
            ],
            "deltas": self.deltas,
            "all_passed": self.all_passed,
        }


def _state_acc(report: EvalReport, state: str, variant: str) -> float | None:
    row = report.states.get(state)
    if row is None:
        return None
    return row["accuracy"][variant]


def compare(report: EvalReport) -> Comparison:
    """Check the qualitative ordering claims against a three-variant report."""
    for variant in VARIANTS:
        if variant not in report.variants:
            raise ValueError(f"report missing variant {variant!r}")

    deltas = {
        state: {
            VARIANT_OWO: row["accuracy"][VARIANT_OWO] - row["accuracy"][VARIANT_NB],
            VARIANT_OWO_PI: row["accuracy"][VARIANT_OWO_PI] - row["accuracy"][VARIANT_NB],
        }
        for state, row in report.states.items()
    }

    claims: list[Claim] = []

    def add(name: str, passed: bool, detail: str) -> None:
        claims.append(Claim(name, passed, detail))

    aws = {v: _state_acc(report, "AWS", v) for v in VARIANTS}
    if any(acc is None for acc in aws.values()):
        add("aws_all_variants", False, "AWS state absent from test rows")
    else:
        worst = min(aws.values())
        add(
            "aws_all_variants",
            worst >= AWS_FLOOR,
            f"min AWS accuracy {worst:.4f} (floor {AWS_FLOOR})",
        )

    cruise_nb = _state_acc(report, "Cruise", VARIANT_NB)
    cruise_pi = _state_acc(report, "Cruise", VARIANT_OWO_PI)
    if cruise_nb is None or cruise_pi is None:
        add("cruise_owo_pi_gain", False, "Cruise state absent from test rows")
    else:
        add(
            "cruise_owo_pi_gain",
            cruise_pi >= cruise_nb + CRUISE_GAIN,
            f"Cruise OwO+PI {cruise_pi:.4f} vs NB {cruise_nb:.4f} (needs +{CRUISE_GAIN})",
        )

    for state, claim_name in (
        ("Brake_Change", "brake_change_owo"),
        ("Speed_Change", "speed_change_owo"),
    ):
        nb = _state_acc(report, state, VARIANT_NB)
        owo = _state_acc(report, state, VARIANT_OWO)
        if nb is None or owo is None:
            add(claim_name, False, f"{state} absent from test rows")
        else:
            add(
                claim_name,
                owo >= nb,
                f"{state} OwO {owo:.4f} vs NB {nb:.4f}",
            )

    ec_owo = _state_acc(report, "Engine_Check", VARIANT_OWO)
    ec_pi = _state_acc(report, "Engine_Check", VARIANT_OWO_PI)
    if ec_owo is None or ec_pi is None:
        add("engine_check_pi_gain", False, "Engine_Check absent from test rows")
    else:
        add(
            "engine_check_pi_gain",
            ec_pi >= ec_owo,
            f"Engine_Check OwO+PI {ec_pi:.4f} vs OwO {ec_owo:.4f}",
        )

    best_owo = max(report.overall[VARIANT_OWO], report.overall[VARIANT_OWO_PI])
    nb_overall = report.overall[VARIANT_NB]
    add(
        "overall_best_owo",
        best_owo >= nb_overall + OVERALL_GAIN,
        f"best OwO overall {best_owo:.4f} vs NB {nb_overall:.4f} (needs +{OVERALL_GAIN})",
    )

    return Comparison(claims, deltas, all(c.passed for c in claims))


_VARIANT_LABEL = {
    VARIANT_NB: "NB Acc.",
    VARIANT_OWO: "OwO w/o PI",
    VARIANT_OWO_PI: "OwO with PI",
}


def render_report_table(report: EvalReport) -> str:
    """Plain-text accuracy table, one row per state plus the overall line."""
    variants = list(report.variants)
    header = ["State", "Support"] + [_VARIANT_LABEL.get(v, v) for v in variants]
    rows = [header]
    for state in (s.value for s in STATE_ORDER):
        entry = report.states.get(state)
        if entry is None:
            rows.append([state, "absent"] + ["-" for _ in variants])
            continue
        rows.append(
            [state, str(entry["support"])]
            + [f"{entry['accuracy'][v] * 100:.1f}%" for v in variants]
        )
    rows.append(
        ["Overall", str(report.total_rows)]
        + [f"{report.overall[v] * 100:.1f}%" for v in variants]
    )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)))
        if i == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines)


def report_json(report: EvalReport) -> str:
    """Canonical JSON for a report: key-sorted, newline-terminated.

    The CLI and the tuning service both emit exactly this form, so equal
    inputs produce byte-equal report files.
    """
    return json.dumps(report.to_dict(), sort_keys=True) + "\n"


def save_report(report: EvalReport, path: str | Path) -> None:
    Path(path).write_text(report_json(report))


def load_report(path: str | Path) -> EvalReport:
    return EvalReport.from_dict(json.loads(Path(path).read_text()))
