"""Scripted driver: produces the labelled inputs the classifiers learn from.

The driver follows the per-state goals: acknowledge warnings with zeroed
controls, coast in Cruise, correct speed proportionally in the change
states, and brake to the curve for station stops. A small seeded notch
perturbation adds run-to-run variety; it is suppressed wherever the
operating rules demand exact inputs (AWS, Engine_Check, the approach to a
signal, and at a stand).
"""

from __future__ import annotations

import math
import random

from .constants import (
    B_MAX_MPS2,
    BRAKE_GAIN,
    BRAKE_MARGIN,
    NOISE_PROB,
    NOTCH_MAX,
    RECOVERY_FRAC,
    SIGNAL_COAST_M,
    SPEED_GAIN,
)
from .dynamics import COMMANDS, IDLE, InputCommand
from .odm import OperationalState


def _power(underspeed: float) -> InputCommand:
    # Floor of 2: corrections are applied decisively and released, rather
    # than trailing off through a long notch-1 crawl.
    notch = max(2, min(NOTCH_MAX, round(SPEED_GAIN * underspeed)))
    return COMMANDS[(notch, 0)]


def _brake(overspeed: float) -> InputCommand:
    notch = max(2, min(NOTCH_MAX, round(BRAKE_GAIN * overspeed)))
    return COMMANDS[(0, notch)]


def plan_stop_notch(speed: float, remaining_m: float, conservatism: float = 1.0) -> int:
    """Brake notch for a station stop, set once when the stop is committed.

    Sized from the stopping-distance deficit with a safety margin; held for
    the whole approach (one firm application, not a trickle of adjustments).
    conservatism scales the margin, standing in for how early different
    drivers like to have the stop in hand.
    """
    required = speed * speed / (2.0 * max(remaining_m, 0.5))
    notch = math.ceil(NOTCH_MAX * required * BRAKE_MARGIN * conservatism / B_MAX_MPS2)
    return max(2, min(NOTCH_MAX, notch))


def _stopping_command(speed: float, stop_notch: int) -> InputCommand:
    """Ride the planned notch down, settle at notch 2, hold at a stand."""
    if speed <= 0.0:
        return COMMANDS[(0, 1)]
    if speed < 0.3:
        return COMMANDS[(0, 2)]
    return COMMANDS[(0, stop_notch)]


def _perturb(command: InputCommand, rng: random.Random) -> InputCommand:
    """With probability NOISE_PROB move one lever by one notch.

    Perturbations that would leave the valid command set (range or the
    no-counteracting rule) are dropped rather than redirected.
    """
    if rng.random() >= NOISE_PROB:
        return command
    delta = 1 if rng.random() < 0.5 else -1
    p, b = command.power_notch, command.brake_notch
    if rng.random() < 0.5:
        p += delta
    else:
        b += delta
    if not (0 <= p <= NOTCH_MAX and 0 <= b <= NOTCH_MAX):
        return command
    if p > 0 and b > 0:
        return command
    return COMMANDS[(p, b)]


def scripted_policy(
    state: OperationalState,
    obs,
    target_mps: float,
    rng: random.Random,
    prev_input: InputCommand = IDLE,
    next_signal_m: float | None = None,
    station_stop_notch: int | None = None,
) -> InputCommand:
    """Driver command for one step.

    obs only needs an S attribute (current speed); target_mps is the speed
    the current state is working towards. station_stop_notch is set while a
    committed station stop is being driven (see plan_stop_notch);
    next_signal_m is the distance to the next signal, used to ease off
    ahead of it.
    """
    if state is OperationalState.AWS or state is OperationalState.ENGINE_CHECK:
        return IDLE

    if station_stop_notch is not None:
        command = _stopping_command(obs.S, station_stop_notch)
        if obs.S > 0.0:
            command = _perturb(command, rng)
        return command

    if next_signal_m is not None and next_signal_m <= SIGNAL_COAST_M:
        return IDLE

    speed = obs.S
    if state is OperationalState.BRAKE_CHANGE:
        # Brake until inside the recovery window, then hand back to Cruise.
        # Braking past the window would leave the train dragging below the
        # band with no way out of this state.
        over = speed - target_mps
        command = _brake(over) if over > RECOVERY_FRAC * target_mps else IDLE
    elif state is OperationalState.SPEED_CHANGE:
        under = target_mps - speed
        command = _power(under) if under > 0 else IDLE
    else:  # Cruise: coast; corrections belong to the change states
        command = _power(target_mps - speed) if speed < 0.955 * target_mps else IDLE

    if speed > 0.0:
        command = _perturb(command, rng)
    return command
