"""Per-user transaction state machine for the two-step provisioning flow.

One machine instance covers one attempt by one user at one display:
first message shown and scanned, registration confirmed over the
high-speed channel, second message shown and scanned, resources
delivered. A lapsed display deadline lands in Expired; a failed scan in
Failed. Both are terminal for the attempt (the caller may start over).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional


class Phase(Enum):
    IDLE = "idle"
    T1_DISPLAYED = "t1_displayed"
    T1_SCANNED = "t1_scanned"
    REGISTERED = "registered"
    T2_DISPLAYED = "t2_displayed"
    T2_SCANNED = "t2_scanned"
    COMPLETE = "complete"
    EXPIRED = "expired"
    FAILED = "failed"


TERMINAL = frozenset({Phase.COMPLETE, Phase.EXPIRED, Phase.FAILED})
DISPLAYED = frozenset({Phase.T1_DISPLAYED, Phase.T2_DISPLAYED})


class Event(Enum):
    DISPLAYED_T1 = "displayed_t1"
    USER_SCANNED = "user_scanned"
    REGISTERED_ON_NETWORK = "registered_on_network"
    DISPLAYED_T2 = "displayed_t2"
    USER_SCANNED_T2 = "user_scanned_t2"
    RESOURCES_DELIVERED = "resources_delivered"
    SCAN_FAILED = "scan_failed"
    TICK = "tick"


class Action(Enum):
    REGISTER_USER = "register_user"
    DISPLAY_T2 = "display_t2"
    DELIVER_RESOURCES = "deliver_resources"


class IllegalTransition(Exception):
    """Event fired in a phase that cannot accept it; a harness bug."""


@dataclass(frozen=True)
class HandshakeState:
    phase: Phase = Phase.IDLE
    deadline: Optional[float] = None  # set while a message is on the display

    @property
    def terminal(self) -> bool:
        return self.phase in TERMINAL


def step_handshake(
    state: HandshakeState,
    event: Event,
    now: float,
    issued_at: Optional[float] = None,
    ttl: Optional[float] = None,
) -> tuple[HandshakeState, list[Action]]:
    """Advance one attempt. Deterministic; returns (new state, actions).

    DISPLAYED_T1/DISPLAYED_T2 must carry issued_at and ttl. A message on
    the display goes stale strictly after issued_at + ttl: any event that
    observes a lapsed deadline lands in Expired, so a late scan can never
    progress toward registration.
    """
    phase = state.phase

    if event is Event.TICK:
        if phase in DISPLAYED and now > state.deadline:
            return HandshakeState(Phase.EXPIRED), []
        return state, []

    if phase in DISPLAYED and now > state.deadline:
        return HandshakeState(Phase.EXPIRED), []

    if event is Event.DISPLAYED_T1 and phase is Phase.IDLE:
        _require_display_args(issued_at, ttl)
        return HandshakeState(Phase.T1_DISPLAYED, deadline=issued_at + ttl), []

    if event is Event.USER_SCANNED and phase is Phase.T1_DISPLAYED:
        return HandshakeState(Phase.T1_SCANNED), [Action.REGISTER_USER]

    if event is Event.REGISTERED_ON_NETWORK and phase is Phase.T1_SCANNED:
        return HandshakeState(Phase.REGISTERED), [Action.DISPLAY_T2]

    if event is Event.DISPLAYED_T2 and phase is Phase.REGISTERED:
        _require_display_args(issued_at, ttl)
        return HandshakeState(Phase.T2_DISPLAYED, deadline=issued_at + ttl), []

    if event is Event.USER_SCANNED_T2 and phase is Phase.T2_DISPLAYED:
        return HandshakeState(Phase.T2_SCANNED), [Action.DELIVER_RESOURCES]

    if event is Event.RESOURCES_DELIVERED and phase is Phase.T2_SCANNED:
        return HandshakeState(Phase.COMPLETE), []

    if event is Event.SCAN_FAILED and phase in DISPLAYED:
        return HandshakeState(Phase.FAILED), []

    raise IllegalTransition(f"{event.value} is not valid in phase {phase.value}")


def _require_display_args(issued_at, ttl) -> None:
    if issued_at is None or ttl is None:
        raise IllegalTransition("display events must carry issued_at and ttl")
