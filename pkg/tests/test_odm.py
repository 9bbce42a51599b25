import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from railcab.odm import (
    EventKind,
    OperationalState,
    TransitionEvent,
    initial_state,
    transition,
)

ALL_STATES = list(OperationalState)
ALL_KINDS = list(EventKind)


def make_event(kind: EventKind) -> TransitionEvent:
    aspect = 10.0 if kind is EventKind.SIGNAL_PASSED else None
    return TransitionEvent(kind, position_m=0.0, t_s=0.0, aspect_limit_mps=aspect)


class TestInitialState:
    def test_journeys_start_in_engine_check(self):
        assert initial_state() is OperationalState.ENGINE_CHECK

    def test_pure(self):
        assert initial_state() is initial_state()

    def test_not_cruise(self):
        assert initial_state() is not OperationalState.CRUISE


class TestTransitionTable:
    def test_signal_preempts_every_state(self):
        for state in ALL_STATES:
            assert transition(state, make_event(EventKind.SIGNAL_PASSED)) is OperationalState.AWS

    def test_aws_acknowledged_enters_engine_check(self):
        assert (
            transition(OperationalState.AWS, make_event(EventKind.AWS_ACKNOWLEDGED))
            is OperationalState.ENGINE_CHECK
        )

    def test_aws_ignores_band_events(self):
        for kind in (
            EventKind.SPEED_ABOVE_BAND,
            EventKind.SPEED_BELOW_BAND,
            EventKind.SPEED_IN_BAND,
            EventKind.JOURNEY_START,
        ):
            assert transition(OperationalState.AWS, make_event(kind)) is OperationalState.AWS

    @pytest.mark.parametrize(
        "start",
        [OperationalState.ENGINE_CHECK, OperationalState.CRUISE],
    )
    def test_band_exits_from_engine_check_and_cruise(self, start):
        assert transition(start, make_event(EventKind.SPEED_ABOVE_BAND)) is OperationalState.BRAKE_CHANGE
        assert transition(start, make_event(EventKind.SPEED_BELOW_BAND)) is OperationalState.SPEED_CHANGE
        assert transition(start, make_event(EventKind.SPEED_IN_BAND)) is OperationalState.CRUISE

    @pytest.mark.parametrize(
        "start",
        [OperationalState.BRAKE_CHANGE, OperationalState.SPEED_CHANGE],
    )
    def test_correction_states_exit_only_in_band(self, start):
        assert transition(start, make_event(EventKind.SPEED_IN_BAND)) is OperationalState.CRUISE
        assert transition(start, make_event(EventKind.SPEED_ABOVE_BAND)) is start
        assert transition(start, make_event(EventKind.SPEED_BELOW_BAND)) is start

    def test_brake_change_self_loop_while_still_correcting(self):
        assert (
            transition(OperationalState.BRAKE_CHANGE, make_event(EventKind.SPEED_ABOVE_BAND))
            is OperationalState.BRAKE_CHANGE
        )

    def test_acknowledgment_outside_aws_self_loops(self):
        for state in ALL_STATES:
            if state is OperationalState.AWS:
                continue
            assert transition(state, make_event(EventKind.AWS_ACKNOWLEDGED)) is state

    def test_journey_start_self_loops_everywhere(self):
        for state in ALL_STATES:
            assert transition(state, make_event(EventKind.JOURNEY_START)) is state

    def test_total_over_all_pairs(self):
        for state, kind in itertools.product(ALL_STATES, ALL_KINDS):
            assert transition(state, make_event(kind)) in ALL_STATES


class TestTransitionProperties:
    @settings(max_examples=200, deadline=None)
    @given(
        st.sampled_from(ALL_STATES),
        st.lists(st.sampled_from(ALL_KINDS), min_size=1, max_size=40),
    )
    def test_deterministic_over_event_streams(self, start, kinds):
        def fold(state):
            for kind in kinds:
                state = transition(state, make_event(kind))
            return state

        assert fold(start) is fold(start)

    @settings(max_examples=200, deadline=None)
    @given(
        st.sampled_from(ALL_STATES),
        st.lists(st.sampled_from(ALL_KINDS), min_size=1, max_size=40),
    )
    def test_aws_preemption_and_sole_successor(self, start, kinds):
        state = start
        previous = None
        for kind in kinds:
            next_state = transition(state, make_event(kind))
            if kind is EventKind.SIGNAL_PASSED:
                assert next_state is OperationalState.AWS
            if state is OperationalState.AWS and next_state is not OperationalState.AWS:
                assert next_state is OperationalState.ENGINE_CHECK
            previous, state = state, next_state


class TestEventValidation:
    def test_signal_event_requires_aspect(self):
        with pytest.raises(ValueError, match="aspect"):
            TransitionEvent(EventKind.SIGNAL_PASSED, position_m=0.0, t_s=0.0)
