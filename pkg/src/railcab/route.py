"""Immutable route model: the fixed infrastructure a journey runs over.

A route is a total length, a default line speed, and an ordered list of
features (signals, speed-limit changes, station stops). Milestones are
derived from the features and mark where the operational state machine
receives its transitions.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any


class RouteError(ValueError):
    """Raised when a route document is invalid; carries every violation."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class FeatureKind(str, Enum):
    SIGNAL = "signal"
    SPEED_LIMIT = "speed_limit"
    STATION = "station"
    ROUTE_END = "route_end"


class MilestoneEffect(str, Enum):
    """What crossing a milestone does to the journey."""

    AWS_TRIGGER = "aws_trigger"          # signal passed, cab warning fires
    LIMIT_CHANGE = "limit_change"        # posted speed limit changes
    STATION_STOP = "station_stop"        # scheduled stop with a dwell
    ROUTE_END = "route_end"              # journey terminates


_EFFECT_BY_KIND = {
    FeatureKind.SIGNAL: MilestoneEffect.AWS_TRIGGER,
    FeatureKind.SPEED_LIMIT: MilestoneEffect.LIMIT_CHANGE,
    FeatureKind.STATION: MilestoneEffect.STATION_STOP,
    FeatureKind.ROUTE_END: MilestoneEffect.ROUTE_END,
}


@dataclass(frozen=True)
class RouteFeature:
    """One piece of lineside infrastructure at a fixed position.

    limit_mps is the aspect-implied limit for signals (0 encodes a stop
    aspect) or the new posted limit for speed_limit features; dwell_s is the
    booked stop time for stations.
    """

    position_m: float
    kind: FeatureKind
    limit_mps: float | None = None
    dwell_s: float | None = None


@dataclass(frozen=True)
class RouteSpec:
    """Validated, immutable description of a route. Safe to share freely."""

    length_m: float
    line_speed_mps: float
    features: tuple[RouteFeature, ...]

    def signals(self) -> list[RouteFeature]:
        return [f for f in self.features if f.kind is FeatureKind.SIGNAL]

    def stations(self) -> list[RouteFeature]:
        return [f for f in self.features if f.kind is FeatureKind.STATION]


@dataclass(frozen=True)
class Milestone:
    """A contextual cue derived from exactly one route feature."""

    position_m: float
    trigger: RouteFeature
    effect: MilestoneEffect


_TOP_KEYS = {"length_m", "line_speed_mps", "features"}
_FEATURE_KEYS = {"position_m", "kind", "limit_mps", "dwell_s"}


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def parse_route_document(doc: Any) -> RouteSpec:
    """Validate a parsed route document and build a RouteSpec.

    Collects every violation before failing, so a bad file is reported in
    one shot rather than one error at a time.
    """
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise RouteError(["route document must be a JSON object"])

    for key in doc:
        if key not in _TOP_KEYS:
            errors.append(f"unknown key {key!r}")
    length = doc.get("length_m")
    line_speed = doc.get("line_speed_mps")
    if not _is_number(length) or length <= 0:
        errors.append("length_m must be a positive number")
        length = None
    if not _is_number(line_speed) or line_speed <= 0:
        errors.append("line_speed_mps must be a positive number")
        line_speed = None

    raw_features = doc.get("features")
    features: list[RouteFeature] = []
    if not isinstance(raw_features, list):
        errors.append("features must be a list")
        raw_features = []
    for i, raw in enumerate(raw_features):
        where = f"features[{i}]"
        if not isinstance(raw, dict):
            errors.append(f"{where}: must be an object")
            continue
        for key in raw:
            if key not in _FEATURE_KEYS:
                errors.append(f"{where}: unknown key {key!r}")
        pos = raw.get("position_m")
        if not _is_number(pos):
            errors.append(f"{where}: position_m must be a number")
            continue
        if pos < 0 or (length is not None and pos > length):
            errors.append(f"{where}: position_m {pos} outside [0, {length}]")
        kind_raw = raw.get("kind")
        try:
            kind = FeatureKind(kind_raw)
        except ValueError:
            errors.append(f"{where}: unknown feature kind {kind_raw!r}")
            continue
        limit = raw.get("limit_mps")
        dwell = raw.get("dwell_s")
        if kind is FeatureKind.SIGNAL:
            if not _is_number(limit):
                errors.append(f"{where}: signal requires limit_mps")
            elif limit < 0 or (line_speed is not None and limit > line_speed):
                errors.append(
                    f"{where}: signal limit_mps {limit} outside [0, {line_speed}]"
                )
        elif kind is FeatureKind.SPEED_LIMIT:
            if not _is_number(limit) or limit <= 0:
                errors.append(f"{where}: speed_limit requires limit_mps > 0")
        elif kind is FeatureKind.STATION:
            if not _is_number(dwell) or dwell < 0:
                errors.append(f"{where}: station requires dwell_s >= 0")
        if kind is not FeatureKind.STATION and dwell is not None:
            errors.append(f"{where}: dwell_s only valid on stations")
        if kind in (FeatureKind.STATION, FeatureKind.ROUTE_END) and limit is not None:
            errors.append(f"{where}: limit_mps not valid on {kind.value}")
        features.append(
            RouteFeature(
                position_m=float(pos),
                kind=kind,
                limit_mps=float(limit) if _is_number(limit) else None,
                dwell_s=float(dwell) if _is_number(dwell) else None,
            )
        )

    positions = [f.position_m for f in features]
    if any(b <= a for a, b in zip(positions, positions[1:])):
        errors.append("features must be sorted strictly ascending by position_m")
    if not any(f.kind is FeatureKind.SIGNAL for f in features):
        errors.append("route must contain at least one signal")

    if errors:
        raise RouteError(errors)
    return RouteSpec(
        length_m=float(length),
        line_speed_mps=float(line_speed),
        features=tuple(features),
    )


def route_to_document(route: RouteSpec) -> dict:
    """Inverse of parse_route_document (load(save(r)) == r)."""
    features = []
    for f in route.features:
        raw: dict[str, Any] = {"position_m": f.position_m, "kind": f.kind.value}
        if f.limit_mps is not None:
            raw["limit_mps"] = f.limit_mps
        if f.dwell_s is not None:
            raw["dwell_s"] = f.dwell_s
        features.append(raw)
    return {
        "length_m": route.length_m,
        "line_speed_mps": route.line_speed_mps,
        "features": features,
    }


def load_route(path: str | Path) -> RouteSpec:
    """Load and validate a route file (JSON)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise RouteError([f"{path}: not valid JSON ({exc})"]) from exc
    return parse_route_document(doc)


def save_route(route: RouteSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(route_to_document(route), indent=2) + "\n")


def route_hash(route: RouteSpec) -> str:
    """Stable content hash of a route, used in manifests and reports."""
    canonical = json.dumps(route_to_document(route), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


def derive_milestones(route: RouteSpec) -> list[Milestone]:
    """One milestone per feature, plus a route-end milestone if none exists.

    Deterministic and order-preserving: same route, same list.
    """
    milestones = [
        Milestone(f.position_m, f, _EFFECT_BY_KIND[f.kind]) for f in route.features
    ]
    if not any(m.effect is MilestoneEffect.ROUTE_END for m in milestones):
        end = RouteFeature(position_m=route.length_m, kind=FeatureKind.ROUTE_END)
        milestones.append(Milestone(route.length_m, end, MilestoneEffect.ROUTE_END))
    return milestones
