"""Egress metrics: per-user outcomes plus the aggregates runs are judged by."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

METRICS_SCHEMA = "egresslink-metrics/1"


class MalformedMetrics(Exception):
    """File is not a metrics document this revision understands."""


@dataclass(frozen=True)
class UserOutcome:
    user: str
    exit: Optional[str]
    egress_s: Optional[float]
    guided: bool
    reneged: bool
    scans: int


@dataclass(frozen=True)
class EgressMetrics:
    scenario: str
    seed: int
    mode: str
    alarm_time: Optional[float]
    total_users: int
    exited: int
    makespan: Optional[float]  # last exit - alarm onset; None until anyone exits
    counts: dict
    exit_loads: dict
    per_user: list[UserOutcome]

    @property
    def all_exited(self) -> bool:
        return self.exited == self.total_users

    def egress_times(self) -> list[float]:
        return [u.egress_s for u in self.per_user if u.egress_s is not None]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["schema"] = METRICS_SCHEMA
        out["all_exited"] = self.all_exited
        return out

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["user", "exit", "egress_s", "guided", "reneged",
                             "scans"])
            for u in self.per_user:
                writer.writerow([u.user, u.exit or "",
                                 "" if u.egress_s is None else u.egress_s,
                                 int(u.guided), int(u.reneged), u.scans])


def load_metrics(path: str | Path) -> EgressMetrics:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedMetrics(f"{path}: {exc}") from exc
    if not isinstance(raw, dict) or raw.get("schema") != METRICS_SCHEMA:
        raise MalformedMetrics(
            f"{path}: expected schema {METRICS_SCHEMA!r}, "
            f"found {raw.get('schema')!r}" if isinstance(raw, dict)
            else f"{path}: not a metrics document"
        )
    try:
        per_user = [UserOutcome(**u) for u in raw["per_user"]]
        return EgressMetrics(
            scenario=raw["scenario"],
            seed=raw["seed"],
            mode=raw["mode"],
            alarm_time=raw["alarm_time"],
            total_users=raw["total_users"],
            exited=raw["exited"],
            makespan=raw["makespan"],
            counts=raw["counts"],
            exit_loads=raw["exit_loads"],
            per_user=per_user,
        )
    except (KeyError, TypeError) as exc:
        raise MalformedMetrics(f"{path}: missing or bad field: {exc}") from exc
