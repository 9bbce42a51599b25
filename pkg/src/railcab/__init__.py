"""railcab: deterministic cab simulation, milestone-driven operational
states, and state-weighted driver-input prediction."""

from .classifier import (
    GaussianNbModel,
    fit,
    load_model,
    predict_batch,
    predict_nb,
    predict_owo,
    save_model,
)
from .dataset import Dataset, export_dataset, load_dataset
from .dynamics import InputCommand, TrainState, step_dynamics
from .evaluate import EvalReport, compare, split_runs
from .odm import EventKind, OperationalState, TransitionEvent, initial_state, transition
from .policy import scripted_policy
from .route import (
    FeatureKind,
    Milestone,
    RouteError,
    RouteFeature,
    RouteSpec,
    derive_milestones,
    load_route,
    save_route,
)
from .simulate import ObservationVector, SimulationError, TraceStep, generate_run
from .weights import WeightTable, WeightTableError

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "EvalReport",
    "EventKind",
    "FeatureKind",
    "GaussianNbModel",
    "InputCommand",
    "Milestone",
    "ObservationVector",
    "OperationalState",
    "RouteError",
    "RouteFeature",
    "RouteSpec",
    "SimulationError",
    "TraceStep",
    "TrainState",
    "TransitionEvent",
    "WeightTable",
    "WeightTableError",
    "compare",
    "derive_milestones",
    "export_dataset",
    "fit",
    "generate_run",
    "initial_state",
    "load_dataset",
    "load_model",
    "load_route",
    "predict_batch",
    "predict_nb",
    "predict_owo",
    "save_model",
    "save_route",
    "scripted_policy",
    "split_runs",
    "step_dynamics",
    "transition",
]
