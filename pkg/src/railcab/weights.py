"""Per-state observation weights.

Weights are integer percentages: 100 is the plain naive-Bayes weighting, 0
removes a channel from the decision entirely, and anything above 100
sharpens it. The default table encodes what matters in each operating
state; the PI column covers both previous-input features.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .odm import STATE_NAMES

WEIGHT_KEYS = ("T", "S", "SL", "SLS", "RoA", "ES", "PI")

_DEFAULT = {
    "Cruise":       {"T": 135, "S": 150, "SL": 150, "SLS": 0,   "RoA": 10,  "ES": 0,   "PI": 0},
    "AWS":          {"T": 0,   "S": 0,   "SL": 0,   "SLS": 200, "RoA": 0,   "ES": 0,   "PI": 200},
    "Engine_Check": {"T": 0,   "S": 0,   "SL": 0,   "SLS": 0,   "RoA": 0,   "ES": 200, "PI": 0},
    "Brake_Change": {"T": 10,  "S": 150, "SL": 150, "SLS": 50,  "RoA": 150, "ES": 0,   "PI": 50},
    "Speed_Change": {"T": 10,  "S": 150, "SL": 150, "SLS": 50,  "RoA": 150, "ES": 0,   "PI": 50},
}


class WeightTableError(ValueError):
    """Invalid weight table; carries one message per offending field."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class WeightTable:
    """Immutable mapping of state name -> channel weight percent."""

    def __init__(self, mapping: dict):
        self._table = validate_mapping(mapping)

    @classmethod
    def default(cls) -> "WeightTable":
        return cls(_DEFAULT)

    @classmethod
    def uniform(cls, value: int = 100) -> "WeightTable":
        return cls({s: {k: value for k in WEIGHT_KEYS} for s in STATE_NAMES})

    def weight(self, state_name: str, key: str) -> int:
        if state_name not in self._table:
            raise WeightTableError([f"unknown state {state_name!r}"])
        return self._table[state_name][key]

    def state_weights(self, state_name: str) -> dict:
        if state_name not in self._table:
            raise WeightTableError([f"unknown state {state_name!r}"])
        return dict(self._table[state_name])

    def to_mapping(self) -> dict:
        return {s: dict(row) for s, row in self._table.items()}

    def replace(self, state_name: str, key: str, value: int) -> "WeightTable":
        mapping = self.to_mapping()
        mapping[state_name][key] = value
        return WeightTable(mapping)

    def hash(self) -> str:
        canonical = json.dumps(self._table, sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()

    def __eq__(self, other) -> bool:
        return isinstance(other, WeightTable) and self._table == other._table

    def __repr__(self) -> str:
        return f"WeightTable({self._table!r})"


def validate_mapping(mapping: dict) -> dict:
    """Check a raw mapping and return a normalised copy.

    Every violation is reported with its field path so callers (the HTTP
    service in particular) can surface cell-level messages.
    """
    errors: list[str] = []
    if not isinstance(mapping, dict):
        raise WeightTableError(["weight table must be an object"])
    table: dict[str, dict[str, int]] = {}
    for state in mapping:
        if state not in STATE_NAMES:
            errors.append(f"unknown state {state!r}")
    for state in STATE_NAMES:
        if state not in mapping:
            errors.append(f"missing state {state!r}")
            continue
        row = mapping[state]
        if not isinstance(row, dict):
            errors.append(f"{state}: must be an object of channel weights")
            continue
        for key in row:
            if key not in WEIGHT_KEYS:
                errors.append(f"{state}.{key}: unknown channel")
        normalised = {}
        for key in WEIGHT_KEYS:
            if key not in row:
                errors.append(f"{state}.{key}: missing")
                continue
            value = row[key]
            if isinstance(value, bool) or not isinstance(value, int):
                errors.append(f"{state}.{key}: must be an integer")
            elif value < 0:
                errors.append(f"{state}.{key}: must be >= 0")
            else:
                normalised[key] = value
        table[state] = normalised
    if errors:
        raise WeightTableError(errors)
    return {s: table[s] for s in STATE_NAMES}


def load_weights(path: str | Path) -> WeightTable:
    try:
        mapping = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise WeightTableError([f"{path}: not valid JSON ({exc})"]) from exc
    return WeightTable(mapping)


def save_weights(table: WeightTable, path: str | Path) -> None:
    Path(path).write_text(json.dumps(table.to_mapping(), indent=2, sort_keys=True) + "\n")
