"""Physical channel models: the refresh-limited display with its one-way
optical path to a scanning device, and the always-on high-speed network.

The optical path only carries data while a user points a camera at the
display; nothing ever flows back over it. Channel operations never mutate
global state on their own; they return outcomes and delivery times for the
event loop to schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .qr.payload import QrMatrix
from .randomness import sample_distribution

DEFAULT_REFRESH_HZ = 3.0  # full-matrix LCD update limit
REFRESH_EPSILON = 1e-9    # float slack on the minimum-period comparison


class PowerMode(Enum):
    CONTINUOUS = "continuous"
    SAFE = "safe"  # battery saver: half refresh rate


class ChannelError(Exception):
    pass


class ChannelDisabled(ChannelError):
    pass


class DirectionViolation(ChannelError):
    pass


class ScanOutcome(Enum):
    DELIVERED = "delivered"
    FAILED = "failed"
    BLOCKED = "blocked"
    NOTHING_TO_SCAN = "nothing_to_scan"


class Direction(Enum):
    DEVICE_TO_INFRA = "b2a"  # mobile device -> infrastructure
    INFRA_TO_DEVICE = "a2b"


class HsMode(Enum):
    ONE_WAY = "one_way"  # device -> infrastructure only
    TWO_WAY = "two_way"


@dataclass
class DisplayDevice:
    """One pattern display at one entry point; serves users strictly serially."""

    id: str
    entry_point: str
    refresh_hz: float = DEFAULT_REFRESH_HZ
    power_mode: PowerMode = PowerMode.CONTINUOUS
    current_matrix: Optional[QrMatrix] = None
    current_text: Optional[str] = None
    last_update_at: float = -math.inf
    queue: list[str] = field(default_factory=list)
    in_service: Optional[str] = None
    txn_counter: int = 0

    @property
    def min_period(self) -> float:
        rate = self.refresh_hz
        if self.power_mode is PowerMode.SAFE:
            rate /= 2
        return 1.0 / rate

    def next_txn_id(self) -> int:
        self.txn_counter += 1
        return self.txn_counter

    def can_present(self, now: float) -> bool:
        return now - self.last_update_at >= self.min_period - REFRESH_EPSILON

    def earliest_present(self, now: float) -> float:
        return max(now, self.last_update_at + self.min_period)


def present(display: DisplayDevice, matrix: QrMatrix, now: float,
            text: Optional[str] = None) -> bool:
    """Show a new matrix if the refresh budget allows; report acceptance.

    A rejected update leaves the display untouched; the caller decides
    whether to retry later.
    """
    if not display.can_present(now):
        return False
    display.current_matrix = matrix
    display.current_text = text
    display.last_update_at = now
    return True


@dataclass(frozen=True)
class Obstacle:
    """An opaque wall segment in plan view."""

    a: tuple[float, float]
    b: tuple[float, float]


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 0) - (v < 0)

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return False


@dataclass
class UilChannelModel:
    """Display -> camera path: line of sight, scan duration, failure odds."""

    scan_time: dict = field(default_factory=lambda: {"dist": "lognormal",
                                                     "median": 3.0, "sigma": 0.5})
    failure_prob: float = 0.0
    obstacles: tuple[Obstacle, ...] = ()

    def line_of_sight(self, user_pos, display_pos) -> bool:
        if user_pos is None or display_pos is None:
            return True  # geometry not modeled in this scenario
        return not any(
            _segments_cross(user_pos, display_pos, ob.a, ob.b)
            for ob in self.obstacles
        )


@dataclass(frozen=True)
class ScanPlan:
    """What begin_scan resolved to; the event loop schedules completion."""

    outcome: ScanOutcome
    completes_at: float
    payload: Optional[str] = None


def begin_scan(
    user_pos,
    display: DisplayDevice,
    channel: UilChannelModel,
    now: float,
    rng,
    display_pos=None,
) -> ScanPlan:
    """Resolve one scan attempt by the user at the head of the queue."""
    if display.current_matrix is None:
        return ScanPlan(ScanOutcome.NOTHING_TO_SCAN, now)
    if not channel.line_of_sight(user_pos, display_pos):
        return ScanPlan(ScanOutcome.BLOCKED, now)
    duration = sample_distribution(channel.scan_time, rng)
    if channel.failure_prob > 0 and rng.random() < channel.failure_prob:
        return ScanPlan(ScanOutcome.FAILED, now + duration)
    return ScanPlan(ScanOutcome.DELIVERED, now + duration,
                    payload=display.current_text)


@dataclass
class HighSpeedChannelModel:
    """The network path; always active while enabled, no user in the loop."""

    mode: HsMode = HsMode.TWO_WAY
    latency: dict = field(default_factory=lambda: {"dist": "constant", "value": 0.05})
    loss_prob: float = 0.0
    enabled: bool = True


@dataclass(frozen=True)
class HsResult:
    delivered: bool
    at: float


def send_highspeed(
    channel: HighSpeedChannelModel,
    direction: Direction,
    now: float,
    rng,
) -> HsResult:
    """Latency/loss resolution for one message; payloads ride with the caller."""
    if not channel.enabled:
        raise ChannelDisabled("high-speed channel is disabled in this scenario")
    if channel.mode is HsMode.ONE_WAY and direction is Direction.INFRA_TO_DEVICE:
        raise DirectionViolation("one-way mode only carries device->infrastructure")
    latency = sample_distribution(channel.latency, rng)
    if channel.loss_prob > 0 and rng.random() < channel.loss_prob:
        return HsResult(False, now + latency)
    return HsResult(True, now + latency)
