"""Deterministic discrete-event egress simulation."""

from .audit import AuditFailure, audit_trace, conservation_report
from .engine import COORDINATED, UNCOORDINATED, Simulation, run
from .metrics import EgressMetrics, MalformedMetrics, UserOutcome, load_metrics
from .routing import (
    BuildingGraph,
    CoordinatedAssigner,
    Edge,
    NoReachableExit,
    assign_exits_coordinated,
    assign_exits_uncoordinated,
    default_penalty_factors,
)
from .scenario import InvalidScenario, Scenario, load_dict, load_file
from .trace import dumps as trace_dumps, read_ndjson, write_ndjson

__all__ = [
    "AuditFailure",
    "BuildingGraph",
    "COORDINATED",
    "CoordinatedAssigner",
    "Edge",
    "EgressMetrics",
    "InvalidScenario",
    "MalformedMetrics",
    "NoReachableExit",
    "Scenario",
    "Simulation",
    "UNCOORDINATED",
    "UserOutcome",
    "assign_exits_coordinated",
    "assign_exits_uncoordinated",
    "audit_trace",
    "conservation_report",
    "default_penalty_factors",
    "load_dict",
    "load_file",
    "load_metrics",
    "read_ndjson",
    "run",
    "trace_dumps",
    "write_ndjson",
]
