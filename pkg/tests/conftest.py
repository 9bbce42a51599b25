import pytest

from railcab.route import RouteSpec, parse_route_document
from railcab.simulate import generate_run


@pytest.fixture(scope="session")
def small_route() -> RouteSpec:
    """A short route (~8 minutes simulated) for fast end-to-end tests."""
    return parse_route_document(
        {
            "length_m": 1500.0,
            "line_speed_mps": 3.0,
            "features": [
                {"position_m": 400.0, "kind": "signal", "limit_mps": 3.0},
                {"position_m": 700.0, "kind": "station", "dwell_s": 5.0},
                {"position_m": 1000.0, "kind": "speed_limit", "limit_mps": 2.6},
                {"position_m": 1250.0, "kind": "signal", "limit_mps": 3.0},
            ],
        }
    )


@pytest.fixture(scope="session")
def small_runs(small_route):
    return [generate_run(small_route, seed) for seed in (1, 2)]
