"""State-vector buildup from leveled subsystem chains, plus the alert trigger.

One bit per physical chain: level-1 nodes sample real data flows against a
threshold, support levels (2..5) reduce their children, and the vector is
the tuple of chain outputs. A chain with no fresh sample inside the
staleness window holds its previous bit and reports itself stale.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

MIN_BITS = 4  # a vector needs at least four physical subsystems behind it
MAX_LEVEL = 5
DEFAULT_STALENESS_FACTOR = 3.0  # window = factor * sample period


class Reducer(Enum):
    OR = "or"
    AND = "and"
    MAJORITY = "majority"

    def apply(self, bits: list[int]) -> int:
        if self is Reducer.OR:
            return int(any(bits))
        if self is Reducer.AND:
            return int(all(bits))
        return int(sum(bits) * 2 > len(bits))


@dataclass(frozen=True)
class AlgedonicVector:
    """Condition summary: one bit per chain, most significant chain first."""

    bits: tuple[int, ...]
    updated_at: float

    def __post_init__(self) -> None:
        if len(self.bits) < MIN_BITS:
            raise ValueError(f"vector needs >= {MIN_BITS} bits, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("vector components must be 0 or 1")

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def popcount(self) -> int:
        return sum(self.bits)

    @property
    def uniform(self) -> bool:
        return self.popcount in (0, self.n)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class TriggerConfig:
    threshold: int
    n: int
    adjustable: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.threshold <= self.n:
            raise ValueError(f"threshold {self.threshold} outside 1..{self.n}")


def evaluate_trigger(
    vector: AlgedonicVector, cfg: TriggerConfig
) -> tuple[bool, TriggerConfig]:
    """Alert when enough components are set; unanimity raises the bar.

    Returns (alert, possibly-adjusted config). When the config is
    adjustable and every component agrees (all clear or all set), the
    threshold steps up by one, capped at n. What the alert drives is the
    caller's business.
    """
    alert = vector.popcount >= cfg.threshold
    if cfg.adjustable and vector.uniform:
        cfg = replace(cfg, threshold=min(cfg.threshold + 1, cfg.n))
    return alert, cfg


@dataclass
class SensorFlow:
    """A sampled data flow: scripted values or a seeded pseudo-random draw."""

    subsystem_id: str
    period: float
    threshold: float
    trace: Optional[list[float]] = None  # None -> uniform(0,1) from the rng

    def __post_init__(self) -> None:
        if self.period <= 0:
            raise ValueError("sample period must be positive")
        if self.trace is not None and not self.trace:
            raise ValueError("scripted trace must not be empty")

    def value(self, sample_index: int, rng=None) -> float:
        if self.trace is not None:
            i = min(sample_index, len(self.trace) - 1)  # hold last when exhausted
            return self.trace[i]
        if rng is None:
            raise ValueError(f"sensor {self.subsystem_id} needs an rng")
        return rng.random()


@dataclass
class SubsystemNode:
    """One node of the buildup: a level-1 sampler or a support reducer."""

    id: str
    level: int
    reducer: Reducer = Reducer.OR
    children: list["SubsystemNode"] = field(default_factory=list)
    sensor: Optional[SensorFlow] = None
    buffer_len: int = MIN_BITS
    buffer: deque = field(init=False)
    samples_taken: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        if not 1 <= self.level <= MAX_LEVEL:
            raise ValueError(f"level {self.level} outside 1..{MAX_LEVEL}")
        if self.level == 1:
            if self.children:
                raise ValueError(f"level-1 node {self.id} cannot have children")
            if self.sensor is None:
                raise ValueError(f"level-1 node {self.id} needs a sensor flow")
        else:
            if not self.children:
                raise ValueError(f"support node {self.id} needs children")
            if self.sensor is not None:
                raise ValueError(f"support node {self.id} cannot sample directly")
            for child in self.children:
                if child.level >= self.level:
                    raise ValueError(
                        f"child {child.id} (level {child.level}) must sit below "
                        f"{self.id} (level {self.level})"
                    )
        if self.buffer_len < MIN_BITS:
            raise ValueError(f"buffer of {self.id} needs >= {MIN_BITS} bits")
        self.buffer = deque(maxlen=self.buffer_len)

    def leaves(self) -> list["SubsystemNode"]:
        if self.level == 1:
            return [self]
        out = []
        for child in self.children:
            out.extend(child.leaves())
        return out


def sample(node: SubsystemNode, now: float, rng=None) -> int:
    """Take one level-1 sample: 1 iff the value strictly exceeds the threshold."""
    if node.level != 1:
        raise ValueError(f"{node.id} is not a level-1 node")
    value = node.sensor.value(node.samples_taken, rng)
    node.samples_taken += 1
    bit = int(value > node.sensor.threshold)
    node.buffer.append((now, bit))
    return bit


@dataclass
class SubsystemTree:
    """The full buildup: one chain per vector bit."""

    chains: list[SubsystemNode]
    staleness_factor: float = DEFAULT_STALENESS_FACTOR
    last_bits: list[int] = field(init=False)

    def __post_init__(self) -> None:
        if len(self.chains) < MIN_BITS:
            raise ValueError(f"need >= {MIN_BITS} chains, got {len(self.chains)}")
        self.last_bits = [0] * len(self.chains)

    @property
    def n(self) -> int:
        return len(self.chains)

    def leaves(self) -> list[SubsystemNode]:
        out = []
        for chain in self.chains:
            out.extend(chain.leaves())
        return out


def _node_output(node: SubsystemNode, now: float, factor: float) -> Optional[int]:
    if node.level == 1:
        window = factor * node.sensor.period
        fresh = [b for (t, b) in node.buffer if now - t <= window]
        if not fresh:
            return None
        return node.reducer.apply(fresh)
    outputs = [_node_output(c, now, factor) for c in node.children]
    live = [o for o in outputs if o is not None]
    if not live:
        return None
    return node.reducer.apply(live)


def update_vector(
    tree: SubsystemTree, now: float
) -> tuple[AlgedonicVector, list[str]]:
    """Reduce every chain; stale chains hold their previous bit.

    Returns the fresh vector and the ids of chains that were stale.
    Deterministic and idempotent for fixed buffers.
    """
    stale: list[str] = []
    bits: list[int] = []
    for i, chain in enumerate(tree.chains):
        out = _node_output(chain, now, tree.staleness_factor)
        if out is None:
            stale.append(chain.id)
            bits.append(tree.last_bits[i])
        else:
            bits.append(out)
    tree.last_bits = bits
    return AlgedonicVector(bits=tuple(bits), updated_at=now), stale
