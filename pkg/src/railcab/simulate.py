"""Trace generation: run the dynamics, the state machine, and the driver
policy over a route and record one labelled step per tick.

A run is fully determined by (route, seed, dt). Each recorded step holds
the observation channels, the operational state the cab was in, the input
the driver produced, and the previous input.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .constants import (
    ACK_DELAY_PROB,
    BAND_FRAC,
    DT_S,
    DWELL_JITTER_S,
    MAX_STEPS_DEFAULT,
    RECOVERY_FRAC,
    ROA_NOISE_SD,
    STATION_TRIGGER_DECEL,
    STOP_CONSERVATISM,
)
from .dynamics import IDLE, InputCommand, TrainState, step_dynamics
from .odm import EventKind, OperationalState, TransitionEvent, initial_state, transition
from .policy import plan_stop_notch, scripted_policy
from .route import FeatureKind, MilestoneEffect, RouteSpec, derive_milestones


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True, slots=True)
class ObservationVector:
    """One timestep of cab channels."""

    T: float    # seconds since run start
    S: float    # speed, m/s
    SL: float   # posted speed limit, m/s
    SLS: float  # limit implied by the most recently passed signal, m/s
    RoA: float  # rate of acceleration, m/s^2 (noisy accelerometer)
    ES: int     # engine state, 0 or 1


@dataclass(frozen=True, slots=True)
class TraceStep:
    t_s: float
    pos_m: float
    obs: ObservationVector
    state: OperationalState
    input: InputCommand
    prev_input: InputCommand


def band_event_kind(speed: float, target: float) -> EventKind | None:
    """Level-triggered band detector.

    Reports above/below outside the operational band, in-band only once
    speed has recovered to within RECOVERY_FRAC of the target, and nothing
    in between; the dead zone is what lets a correction state run to
    completion instead of bouncing off the band edge.
    """
    if target <= 0.0:
        return EventKind.SPEED_IN_BAND if speed <= 0.0 else EventKind.SPEED_ABOVE_BAND
    if speed > (1.0 + BAND_FRAC) * target:
        return EventKind.SPEED_ABOVE_BAND
    if speed < (1.0 - BAND_FRAC) * target:
        return EventKind.SPEED_BELOW_BAND
    if abs(speed - target) <= RECOVERY_FRAC * target:
        return EventKind.SPEED_IN_BAND
    return None


def generate_run(
    route: RouteSpec,
    seed: int,
    dt: float = DT_S,
    max_steps: int = MAX_STEPS_DEFAULT,
) -> list[TraceStep]:
    """Simulate one journey from rest at position 0 to the route end.

    Raises SimulationError if the policy fails to finish the route within
    max_steps (a diverging run is a bug, not data).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    rng = random.Random(seed)

    signals = [
        (f.position_m, f.limit_mps)
        for f in route.features
        if f.kind is FeatureKind.SIGNAL
    ]
    limit_changes = [
        (f.position_m, f.limit_mps)
        for f in route.features
        if f.kind is FeatureKind.SPEED_LIMIT
    ]
    stations = [
        (f.position_m, f.dwell_s)
        for f in route.features
        if f.kind is FeatureKind.STATION
    ]
    end_pos = min(
        m.position_m
        for m in derive_milestones(route)
        if m.effect is MilestoneEffect.ROUTE_END
    )

    state = initial_state()
    # Engine idles from before departure; ES flips to 0 only if a route never
    # powers at all, which the policy prevents.
    train = TrainState(position_m=0.0, speed_mps=0.0, accel_mps2=0.0, engine_on=True, t_s=0.0)
    sls = route.line_speed_mps
    sl = route.line_speed_mps
    prev_input = IDLE

    sig_idx = 0
    limit_idx = 0
    station_idx = 0
    latched = False
    stop_notch = 0
    dwell_until: float | None = None

    crossed_aspect: float | None = None
    aws_zero_rows = 0
    ack_needed = 2

    steps: list[TraceStep] = []
    for k in range(max_steps):
        pos = train.position_m
        speed = train.speed_mps
        t = train.t_s

        while limit_idx < len(limit_changes) and limit_changes[limit_idx][0] <= pos:
            sl = limit_changes[limit_idx][1]
            limit_idx += 1
        limit = min(sl, sls)

        # Station latch/dwell bookkeeping: a stop is committed once the
        # remaining distance falls under the braking curve; the brake plan
        # is sized at that moment and held.
        station_notch: int | None = None
        if station_idx < len(stations):
            st_pos, st_dwell = stations[station_idx]
            if not latched and st_pos - pos <= speed * speed / (2.0 * STATION_TRIGGER_DECEL):
                latched = True
                stop_notch = plan_stop_notch(
                    speed, st_pos - pos, conservatism=rng.uniform(*STOP_CONSERVATISM)
                )
            if latched:
                if speed == 0.0 and dwell_until is None:
                    dwell_until = t + st_dwell + rng.uniform(0.0, DWELL_JITTER_S)
                if dwell_until is not None and t >= dwell_until:
                    latched = False
                    dwell_until = None
                    station_idx += 1
                else:
                    station_notch = stop_notch
        target = 0.0 if latched else limit

        # Event detection for this step (one event, in priority order).
        event_kind: EventKind | None = None
        aspect: float | None = None
        if k == 0:
            event_kind = EventKind.JOURNEY_START
        elif crossed_aspect is not None:
            event_kind = EventKind.SIGNAL_PASSED
            aspect = crossed_aspect
            crossed_aspect = None
        elif state is OperationalState.AWS and aws_zero_rows >= ack_needed:
            event_kind = EventKind.AWS_ACKNOWLEDGED
        else:
            event_kind = band_event_kind(speed, target)
        if event_kind is not None:
            state = transition(
                state, TransitionEvent(event_kind, pos, t, aspect_limit_mps=aspect)
            )
        if state is not OperationalState.AWS:
            aws_zero_rows = 0

        obs = ObservationVector(
            T=t,
            S=speed,
            SL=sl,
            SLS=sls,
            RoA=train.accel_mps2 + rng.gauss(0.0, ROA_NOISE_SD),
            ES=1 if train.engine_on else 0,
        )
        next_signal_m = signals[sig_idx][0] - pos if sig_idx < len(signals) else None
        command = scripted_policy(
            state,
            obs,
            target,
            rng,
            prev_input=prev_input,
            next_signal_m=next_signal_m,
            station_stop_notch=station_notch,
        )
        steps.append(TraceStep(t, pos, obs, state, command, prev_input))

        if state is OperationalState.AWS and command == IDLE:
            aws_zero_rows += 1

        train = step_dynamics(train, command, dt)
        if sig_idx < len(signals) and train.position_m >= signals[sig_idx][0]:
            crossed_aspect = signals[sig_idx][1]
            sls = crossed_aspect
            sig_idx += 1
            aws_zero_rows = 0
            ack_needed = 3 if rng.random() < ACK_DELAY_PROB else 2
        prev_input = command
        if train.position_m >= end_pos:
            return steps

    raise SimulationError(
        f"run did not reach the route end within {max_steps} steps "
        f"(position {train.position_m:.1f} of {end_pos:.1f} m)"
    )
