"""Access to the bundled demo route."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .route import RouteSpec, load_route

FIXTURE_ROUTE_NAME = "swalwell_proxy"


def fixture_route_path() -> Path:
    """Path of the bundled route file (a slow, stop-heavy 12.4 km proxy)."""
    return Path(resources.files("railcab").joinpath("data/swalwell_proxy.json"))


def load_fixture_route() -> RouteSpec:
    return load_route(fixture_route_path())
