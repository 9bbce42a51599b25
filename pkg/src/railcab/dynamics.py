"""Longitudinal train dynamics: notch inputs to motion, one step at a time."""

from __future__ import annotations

from dataclasses import dataclass

from .constants import (
    A_MAX_MPS2,
    B_MAX_MPS2,
    NOTCH_MAX,
    RESIST_C0,
    RESIST_C1,
    RESIST_C2,
)


@dataclass(frozen=True)
class InputCommand:
    """A driver command: one power notch and one brake notch, 0..4 each.

    Power and brake never counteract; at most one of them is non-zero.
    """

    power_notch: int
    brake_notch: int

    def __post_init__(self):
        if not (0 <= self.power_notch <= NOTCH_MAX):
            raise ValueError(f"power_notch {self.power_notch} outside 0..{NOTCH_MAX}")
        if not (0 <= self.brake_notch <= NOTCH_MAX):
            raise ValueError(f"brake_notch {self.brake_notch} outside 0..{NOTCH_MAX}")
        if self.power_notch > 0 and self.brake_notch > 0:
            raise ValueError("counteracting input: power and brake both applied")


# The valid command set is tiny; reuse instances instead of allocating one
# per simulation step.
COMMANDS: dict[tuple[int, int], InputCommand] = {
    (p, b): InputCommand(p, b)
    for p in range(NOTCH_MAX + 1)
    for b in range(NOTCH_MAX + 1)
    if p == 0 or b == 0
}
IDLE = COMMANDS[(0, 0)]


@dataclass(frozen=True)
class TrainState:
    position_m: float
    speed_mps: float
    accel_mps2: float
    engine_on: bool
    t_s: float


def resistance(speed_mps: float) -> float:
    """Mass-normalised running resistance in m/s^2."""
    return RESIST_C0 + RESIST_C1 * speed_mps + RESIST_C2 * speed_mps * speed_mps


def step_dynamics(train: TrainState, command: InputCommand, dt: float) -> TrainState:
    """Advance one step with semi-implicit Euler; speed clamps at zero.

    The recorded acceleration is the effective one, (v' - v)/dt, so a train
    held at rest reports zero rather than the unbalanced resistance term.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    v = train.speed_mps
    accel = (
        command.power_notch / NOTCH_MAX * A_MAX_MPS2
        - command.brake_notch / NOTCH_MAX * B_MAX_MPS2
        - resistance(v)
    )
    v_next = v + accel * dt
    if v_next < 0.0:
        v_next = 0.0
    return TrainState(
        position_m=train.position_m + v_next * dt,
        speed_mps=v_next,
        accel_mps2=(v_next - v) / dt,
        engine_on=train.engine_on or command.power_notch > 0,
        t_s=train.t_s + dt,
    )
