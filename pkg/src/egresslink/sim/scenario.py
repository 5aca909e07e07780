"""Scenario files: JSON schema, loading, and semantic validation.

A scenario is the complete input to one simulation run: building graph,
displays (exactly one per entry point), population, sensor chains,
channel parameters, and the master seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema

from ..algedonic import (
    MIN_BITS,
    Reducer,
    SensorFlow,
    SubsystemNode,
    SubsystemTree,
    TriggerConfig,
)
from ..channel import (
    DisplayDevice,
    HighSpeedChannelModel,
    HsMode,
    Obstacle,
    PowerMode,
    UilChannelModel,
)
from ..protocol import NetworkAccess
from .routing import BuildingGraph, Edge

SCHEMA_TAG = "egresslink-scenario/1"

_DIST_SCHEMA = {
    "type": "object",
    "properties": {
        "dist": {"enum": ["constant", "uniform", "exponential", "lognormal"]},
        "value": {"type": "number"},
        "low": {"type": "number"},
        "high": {"type": "number"},
        "mean": {"type": "number"},
        "median": {"type": "number"},
        "sigma": {"type": "number"},
    },
    "required": ["dist"],
}

_NODE_SPEC = {
    "type": "object",
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "level": {"type": "integer", "minimum": 1, "maximum": 5},
        "reducer": {"enum": ["or", "and", "majority"]},
        "sensor": {"type": "string"},
        "buffer": {"type": "integer", "minimum": 4},
        "children": {"type": "array"},  # recursion checked in code
    },
    "required": ["id", "level"],
}

SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "name": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "horizon_s": {"type": "number", "exclusiveMinimum": 0},
        "graph": {
            "type": "object",
            "properties": {
                "nodes": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "id": {"type": "string", "minLength": 1},
                            "kind": {"enum": ["room", "corridor", "entry", "exit"]},
                            "pos": {"type": "array", "items": {"type": "number"},
                                    "minItems": 2, "maxItems": 2},
                        },
                        "required": ["id", "kind"],
                    },
                },
                "edges": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "a": {"type": "string"},
                            "b": {"type": "string"},
                            "traverse_s": {"type": "number", "exclusiveMinimum": 0},
                            "capacity": {"type": "integer", "minimum": 1},
                        },
                        "required": ["a", "b", "traverse_s"],
                    },
                },
            },
            "required": ["nodes", "edges"],
        },
        "displays": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "entry": {"type": "string"},
                    "refresh_hz": {"type": "number", "exclusiveMinimum": 0},
                    "power_mode": {"enum": ["continuous", "safe"]},
                    "ttl_s": {"type": "number", "exclusiveMinimum": 0},
                },
                "required": ["id", "entry"],
            },
        },
        "population": {
            "type": "object",
            "properties": {
                "groups": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "node": {"type": "string"},
                            "count": {"type": "integer", "minimum": 0},
                            "device_ratio": {"type": "number",
                                             "minimum": 0, "maximum": 1},
                        },
                        "required": ["node", "count"],
                    },
                },
                "reaction_delay": _DIST_SCHEMA,
                "patience_s": {"type": "number", "exclusiveMinimum": 0},
                "max_scan_attempts": {"type": "integer", "minimum": 1},
            },
            "required": ["groups"],
        },
        "sensors": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "period_s": {"type": "number", "exclusiveMinimum": 0},
                    "threshold": {"type": "number"},
                    "trace": {"type": "array", "items": {"type": "number"},
                              "minItems": 1},
                },
                "required": ["id", "period_s", "threshold"],
            },
        },
        "subsystems": {
            "type": "object",
            "properties": {
                "staleness_factor": {"type": "number", "exclusiveMinimum": 0},
                "chains": {"type": "array", "minItems": 4, "items": _NODE_SPEC},
            },
            "required": ["chains"],
        },
        "trigger": {
            "type": "object",
            "properties": {
                "threshold": {"type": "integer", "minimum": 1},
                "adjustable": {"type": "boolean"},
            },
            "required": ["threshold"],
        },
        "network": {
            "type": "object",
            "properties": {
                "name": {"type": "string", "minLength": 1},
                "credential": {"type": "string", "minLength": 1},
                "endpoint": {"type": "string", "minLength": 1},
            },
            "required": ["name", "credential", "endpoint"],
        },
        "channels": {
            "type": "object",
            "properties": {
                "uil": {
                    "type": "object",
                    "properties": {
                        "scan_time": _DIST_SCHEMA,
                        "failure_prob": {"type": "number",
                                         "minimum": 0, "maximum": 1},
                        "obstacles": {"type": "array"},
                    },
                },
                "highspeed": {
                    "type": "object",
                    "properties": {
                        "mode": {"enum": ["one_way", "two_way"]},
                        "latency": _DIST_SCHEMA,
                        "loss_prob": {"type": "number", "minimum": 0, "maximum": 1},
                        "enabled": {"type": "boolean"},
                    },
                },
            },
        },
        "assignment": {
            "type": "object",
            "properties": {
                "penalty_factor": {
                    "oneOf": [{"const": "auto"},
                              {"type": "number", "minimum": 0}],
                },
            },
        },
        "manifest": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["schema", "name", "seed", "horizon_s", "graph", "displays",
                 "population", "sensors", "subsystems", "trigger", "network"],
}


class InvalidScenario(Exception):
    """Scenario file fails schema or semantic validation."""


@dataclass(frozen=True)
class UserSpec:
    id: str
    node: str
    has_device: bool


@dataclass
class Scenario:
    name: str
    seed: int
    horizon_s: float
    graph: BuildingGraph
    display_specs: list[dict]
    users: list[UserSpec]
    reaction_delay: dict
    patience_s: float
    max_scan_attempts: int
    sensors: dict[str, SensorFlow]
    subsystem_spec: dict
    trigger: TriggerConfig
    network: NetworkAccess
    uil: UilChannelModel
    highspeed: HighSpeedChannelModel
    penalty_factor: Optional[float]  # None -> auto per-exit heuristic
    manifest: tuple[str, ...]
    raw: dict = field(repr=False, default_factory=dict)

    def build_displays(self) -> list[DisplayDevice]:
        out = []
        for spec in self.display_specs:
            out.append(DisplayDevice(
                id=spec["id"],
                entry_point=spec["entry"],
                refresh_hz=spec.get("refresh_hz", 3.0),
                power_mode=PowerMode(spec.get("power_mode", "continuous")),
            ))
        return out

    def display_ttl(self, display_id: str) -> float:
        for spec in self.display_specs:
            if spec["id"] == display_id:
                return spec.get("ttl_s", 30.0)
        raise KeyError(display_id)

    def build_tree(self) -> SubsystemTree:
        chains = [_build_node(spec, self.sensors)
                  for spec in self.subsystem_spec["chains"]]
        return SubsystemTree(
            chains=chains,
            staleness_factor=self.subsystem_spec.get("staleness_factor", 3.0),
        )


def _build_node(spec: dict, sensors: dict[str, SensorFlow]) -> SubsystemNode:
    children = [_build_node(c, sensors) for c in spec.get("children", [])]
    sensor = None
    if "sensor" in spec:
        sensor = sensors.get(spec["sensor"])
        if sensor is None:
            raise InvalidScenario(f"node {spec['id']} references unknown "
                                  f"sensor {spec['sensor']!r}")
    try:
        return SubsystemNode(
            id=spec["id"],
            level=spec["level"],
            reducer=Reducer(spec.get("reducer", "or")),
            children=children,
            sensor=sensor,
            buffer_len=spec.get("buffer", max(MIN_BITS, 8)),
        )
    except ValueError as exc:
        raise InvalidScenario(str(exc)) from exc


def load_file(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidScenario(f"{path}: not valid JSON: {exc}") from exc
    return load_dict(raw)


def load_dict(raw: dict) -> Scenario:
    try:
        jsonschema.validate(raw, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidScenario(f"at {where}: {exc.message}") from exc

    nodes = {}
    for node in raw["graph"]["nodes"]:
        if node["id"] in nodes:
            raise InvalidScenario(f"duplicate node id {node['id']!r}")
        nodes[node["id"]] = node["kind"]

    edges = []
    for e in raw["graph"]["edges"]:
        for end in (e["a"], e["b"]):
            if end not in nodes:
                raise InvalidScenario(f"edge references unknown node {end!r}")
        if e["a"] == e["b"]:
            raise InvalidScenario(f"self-loop on node {e['a']!r}")
        edges.append(Edge(e["a"], e["b"], float(e["traverse_s"]),
                          float(e.get("capacity", math.inf))))
    graph = BuildingGraph(nodes, edges)

    if not graph.exits:
        raise InvalidScenario("graph has no exit nodes")

    # exactly one display per entry point
    entries = set(graph.entries)
    seen_entries: set[str] = set()
    display_ids: set[str] = set()
    for spec in raw["displays"]:
        if spec["id"] in display_ids:
            raise InvalidScenario(f"duplicate display id {spec['id']!r}")
        display_ids.add(spec["id"])
        entry = spec["entry"]
        if entry not in entries:
            raise InvalidScenario(
                f"display {spec['id']!r} placed at {entry!r}, "
                f"which is not an entry point"
            )
        if entry in seen_entries:
            raise InvalidScenario(f"entry point {entry!r} has more than one display")
        seen_entries.add(entry)
    missing = entries - seen_entries
    if missing:
        raise InvalidScenario(
            f"entry point {sorted(missing)[0]!r} has no display"
        )

    users = []
    for gi, group in enumerate(raw["population"]["groups"]):
        if group["node"] not in nodes:
            raise InvalidScenario(
                f"population group {gi} starts at unknown node {group['node']!r}"
            )
        ratio = float(group.get("device_ratio", 1.0))
        count = group["count"]
        with_device = round(count * ratio)
        for k in range(count):
            users.append(UserSpec(
                id=f"U{len(users) + 1:04d}",
                node=group["node"],
                has_device=k < with_device,
            ))

    # every user must be able to reach some exit
    for user in users:
        dist, _ = graph.shortest(user.node)
        if not any(x in dist for x in graph.exits):
            raise InvalidScenario(
                f"user {user.id} at {user.node!r} cannot reach any exit"
            )

    sensors = {}
    for s in raw["sensors"]:
        if s["id"] in sensors:
            raise InvalidScenario(f"duplicate sensor id {s['id']!r}")
        sensors[s["id"]] = SensorFlow(
            subsystem_id=s["id"],
            period=float(s["period_s"]),
            threshold=float(s["threshold"]),
            trace=[float(v) for v in s["trace"]] if "trace" in s else None,
        )

    subsystem_spec = raw["subsystems"]
    trigger_raw = raw["trigger"]
    n_chains = len(subsystem_spec["chains"])
    if trigger_raw["threshold"] > n_chains:
        raise InvalidScenario(
            f"trigger threshold {trigger_raw['threshold']} exceeds "
            f"the {n_chains}-bit vector"
        )
    trigger = TriggerConfig(
        threshold=trigger_raw["threshold"],
        n=n_chains,
        adjustable=trigger_raw.get("adjustable", False),
    )

    # leaf sensors must exist and be used at most once
    used: set[str] = set()
    def walk(spec):
        if "sensor" in spec:
            if spec["sensor"] in used:
                raise InvalidScenario(
                    f"sensor {spec['sensor']!r} feeds more than one leaf"
                )
            used.add(spec["sensor"])
        for child in spec.get("children", []):
            walk(child)
    for chain in subsystem_spec["chains"]:
        walk(chain)

    net_raw = raw["network"]
    try:
        network = NetworkAccess(net_raw["name"], net_raw["credential"],
                                net_raw["endpoint"])
    except ValueError as exc:
        raise InvalidScenario(f"network: {exc}") from exc

    ch = raw.get("channels", {})
    uil_raw = ch.get("uil", {})
    obstacles = tuple(
        Obstacle(tuple(o["a"]), tuple(o["b"]))
        for o in uil_raw.get("obstacles", [])
    )
    uil = UilChannelModel(
        scan_time=uil_raw.get("scan_time",
                              {"dist": "lognormal", "median": 3.0, "sigma": 0.5}),
        failure_prob=float(uil_raw.get("failure_prob", 0.0)),
        obstacles=obstacles,
    )
    hs_raw = ch.get("highspeed", {})
    highspeed = HighSpeedChannelModel(
        mode=HsMode(hs_raw.get("mode", "two_way")),
        latency=hs_raw.get("latency", {"dist": "constant", "value": 0.05}),
        loss_prob=float(hs_raw.get("loss_prob", 0.0)),
        enabled=bool(hs_raw.get("enabled", True)),
    )

    penalty = raw.get("assignment", {}).get("penalty_factor", "auto")

    scenario = Scenario(
        name=raw["name"],
        seed=raw["seed"],
        horizon_s=float(raw["horizon_s"]),
        graph=graph,
        display_specs=list(raw["displays"]),
        users=users,
        reaction_delay=raw["population"].get(
            "reaction_delay", {"dist": "lognormal", "median": 10.0, "sigma": 0.8}),
        patience_s=float(raw["population"].get("patience_s", 15.0)),
        max_scan_attempts=int(raw["population"].get("max_scan_attempts", 3)),
        sensors=sensors,
        subsystem_spec=subsystem_spec,
        trigger=trigger,
        network=network,
        uil=uil,
        highspeed=highspeed,
        penalty_factor=None if penalty == "auto" else float(penalty),
        manifest=tuple(raw.get("manifest", ())),
        raw=raw,
    )
    scenario.build_tree()  # surfaces tree construction errors eagerly
    return scenario
