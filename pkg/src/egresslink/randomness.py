"""Named random sub-streams derived from one scenario seed.

Every consumer of randomness pulls from its own named stream, so adding a
new draw site never perturbs the values other sites see. Stream state is
created lazily and cached per name.
"""

from __future__ import annotations

import hashlib
import math
import random


class StreamRegistry:
    def __init__(self, seed: int) -> None:
        self.seed = seed
        self._streams: dict[str, random.Random] = {}

    def stream(self, name: str) -> random.Random:
        rng = self._streams.get(name)
        if rng is None:
            digest = hashlib.sha256(f"{self.seed}:{name}".encode()).digest()
            rng = random.Random(int.from_bytes(digest[:16], "big"))
            self._streams[name] = rng
        return rng


def sample_distribution(spec: dict, rng: random.Random) -> float:
    """Draw from a distribution description as it appears in scenario files.

    Supported kinds:
      {"dist": "constant", "value": v}
      {"dist": "uniform", "low": a, "high": b}
      {"dist": "exponential", "mean": m}
      {"dist": "lognormal", "median": m, "sigma": s}
    """
    kind = spec.get("dist", "constant")
    if kind == "constant":
        return float(spec["value"])
    if kind == "uniform":
        return rng.uniform(float(spec["low"]), float(spec["high"]))
    if kind == "exponential":
        return rng.expovariate(1.0 / float(spec["mean"]))
    if kind == "lognormal":
        return rng.lognormvariate(math.log(float(spec["median"])), float(spec["sigma"]))
    raise ValueError(f"unknown distribution kind {kind!r}")


def distribution_mean(spec: dict) -> float:
    """Analytic mean of a distribution spec (used for heuristics, not draws)."""
    kind = spec.get("dist", "constant")
    if kind == "constant":
        return float(spec["value"])
    if kind == "uniform":
        return (float(spec["low"]) + float(spec["high"])) / 2
    if kind == "exponential":
        return float(spec["mean"])
    if kind == "lognormal":
        return float(spec["median"]) * math.exp(float(spec["sigma"]) ** 2 / 2)
    raise ValueError(f"unknown distribution kind {kind!r}")
