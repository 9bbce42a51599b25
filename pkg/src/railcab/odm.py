"""Operational state machine: five driving modes and their transitions.

States follow the operational domain model: a journey is a sequence of
modes, and milestone or speed-band events move the cab between them. The
transition function is pure and total; feeding it the same event stream
always yields the same state sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class OperationalState(str, Enum):
    CRUISE = "Cruise"
    AWS = "AWS"
    ENGINE_CHECK = "Engine_Check"
    BRAKE_CHANGE = "Brake_Change"
    SPEED_CHANGE = "Speed_Change"


STATE_NAMES = tuple(s.value for s in OperationalState)


class EventKind(str, Enum):
    SIGNAL_PASSED = "signal_passed"
    AWS_ACKNOWLEDGED = "aws_acknowledged"
    SPEED_ABOVE_BAND = "speed_above_band"
    SPEED_BELOW_BAND = "speed_below_band"
    SPEED_IN_BAND = "speed_in_band"
    JOURNEY_START = "journey_start"


@dataclass(frozen=True)
class TransitionEvent:
    kind: EventKind
    position_m: float
    t_s: float
    aspect_limit_mps: float | None = None

    def __post_init__(self):
        if self.kind is EventKind.SIGNAL_PASSED and self.aspect_limit_mps is None:
            raise ValueError("SignalPassed events must carry the signal's aspect limit")


def initial_state() -> OperationalState:
    """Journeys start in the Engine_Check buffer state."""
    return OperationalState.ENGINE_CHECK


def transition(current: OperationalState, event: TransitionEvent) -> OperationalState:
    """Next state for (current, event); unlisted pairs self-loop.

    Passing a signal preempts everything: the cab leaves whatever it was
    doing to acknowledge the warning, and the only way out of AWS is the
    acknowledgment into Engine_Check.
    """
    kind = event.kind
    if kind is EventKind.SIGNAL_PASSED:
        return OperationalState.AWS
    if current is OperationalState.AWS:
        if kind is EventKind.AWS_ACKNOWLEDGED:
            return OperationalState.ENGINE_CHECK
        return current
    if current in (OperationalState.ENGINE_CHECK, OperationalState.CRUISE):
        if kind is EventKind.SPEED_ABOVE_BAND:
            return OperationalState.BRAKE_CHANGE
        if kind is EventKind.SPEED_BELOW_BAND:
            return OperationalState.SPEED_CHANGE
        if kind is EventKind.SPEED_IN_BAND:
            return OperationalState.CRUISE
        return current
    if current in (OperationalState.BRAKE_CHANGE, OperationalState.SPEED_CHANGE):
        if kind is EventKind.SPEED_IN_BAND:
            return OperationalState.CRUISE
        return current
    return current
